#pragma once

#include "mirrorprox/kernels.hpp"

namespace mirrorprox::kernels::detail {

void affine_gap_values_scalar(const AffineGapKernelArgs& args,
                              const double* points, std::size_t begin,
                              std::size_t count, std::size_t stride,
                              double* out);
double excess_sum_scalar(const double* z, std::size_t n, double tau);

#if defined(__x86_64__) || defined(_M_X64)
void affine_gap_values_avx2(const AffineGapKernelArgs& args,
                            const double* points, std::size_t count,
                            std::size_t stride, double* out);
double excess_sum_avx2(const double* z, std::size_t n, double tau);
#endif

#if defined(__aarch64__) || defined(__ARM_NEON)
void affine_gap_values_neon(const AffineGapKernelArgs& args,
                            const double* points, std::size_t count,
                            std::size_t stride, double* out);
double excess_sum_neon(const double* z, std::size_t n, double tau);
#endif

// Shared by every variant: the horizontal reduction order of the four
// partial sums, followed by the sequential tail.
inline double combine_partials(const double partial[4], const double* z,
                               std::size_t begin, std::size_t n, double tau) {
  double sum = (partial[0] + partial[1]) + (partial[2] + partial[3]);
  for (std::size_t i = begin; i < n; ++i) {
    const double d = z[i] - tau;
    sum += d > 0.0 ? d : 0.0;
  }
  return sum;
}

}  // namespace mirrorprox::kernels::detail
