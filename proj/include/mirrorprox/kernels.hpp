#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every SIMD variant performs the same floating-point operations in the same
// order per output as the scalar reference (no FMA contraction, identical
// partial-sum layout), so all variants are bitwise interchangeable. The
// equivalence tests rely on this.

#include <cstddef>
#include <span>
#include <string_view>

namespace mirrorprox::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);

// Best ISA supported by the running CPU. `MIRRORPROX_ISA=scalar|avx2|neon`
// overrides the choice when the requested ISA is available.
Isa detect_isa();

Isa active_isa();
// Throws ContractViolation when `isa` is not available on this CPU.
void set_active_isa(Isa isa);

// Affine VI mapping F(u) = M u + c together with the anchor point x of the
// dual-gap objective <F(u), x - u>.
struct AffineGapKernelArgs {
  std::span<const double> matrix;  // dim*dim, row-major
  std::span<const double> offset;  // dim
  std::span<const double> anchor;  // dim
  std::size_t dim = 0;
};

// Evaluates out[i] = <M u_i + c, x - u_i> for `count` points stored
// coordinate-major: coordinate k of point i lives at points[k*stride + i].
// `points` may be a window into a larger coordinate-major buffer.
void affine_gap_values(const AffineGapKernelArgs& args,
                       std::span<const double> points, std::size_t count,
                       std::size_t stride, std::span<double> out);
void affine_gap_values(Isa isa, const AffineGapKernelArgs& args,
                       std::span<const double> points, std::size_t count,
                       std::size_t stride, std::span<double> out);

// sum_i max(z_i - tau, 0), accumulated in four interleaved partial sums.
double excess_sum(std::span<const double> z, double tau);
double excess_sum(Isa isa, std::span<const double> z, double tau);

}  // namespace mirrorprox::kernels
