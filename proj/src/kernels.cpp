#include "mirrorprox/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "mirrorprox/errors.hpp"

namespace mirrorprox::kernels {
namespace {

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detect_isa()};
  return slot;
}

void check_gap_args(const AffineGapKernelArgs& args,
                    std::span<const double> points, std::size_t count,
                    std::size_t stride, std::span<double> out) {
  if (args.matrix.size() != args.dim * args.dim ||
      args.offset.size() != args.dim || args.anchor.size() != args.dim) {
    throw ContractViolation("affine_gap_values: operand sizes disagree with dim");
  }
  if (args.dim == 0 || stride < count ||
      points.size() < (args.dim - 1) * stride + count || out.size() < count) {
    throw ContractViolation("affine_gap_values: point or output buffer too small");
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__) || defined(__ARM_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("MIRRORPROX_ISA")) {
    const std::string requested(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (requested == isa_name(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw ContractViolation("ISA " + std::string(isa_name(isa)) +
                            " is not available on this CPU");
  }
  active_slot().store(isa, std::memory_order_relaxed);
}

void affine_gap_values(Isa isa, const AffineGapKernelArgs& args,
                       std::span<const double> points, std::size_t count,
                       std::size_t stride, std::span<double> out) {
  check_gap_args(args, points, count, stride, out);
  if (!isa_available(isa)) isa = Isa::Scalar;
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      detail::affine_gap_values_avx2(args, points.data(), count, stride,
                                     out.data());
      return;
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Isa::Neon:
      detail::affine_gap_values_neon(args, points.data(), count, stride,
                                     out.data());
      return;
#endif
    default:
      detail::affine_gap_values_scalar(args, points.data(), 0, count, stride,
                                       out.data());
  }
}

void affine_gap_values(const AffineGapKernelArgs& args,
                       std::span<const double> points, std::size_t count,
                       std::size_t stride, std::span<double> out) {
  affine_gap_values(active_isa(), args, points, count, stride, out);
}

double excess_sum(Isa isa, std::span<const double> z, double tau) {
  if (!isa_available(isa)) isa = Isa::Scalar;
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return detail::excess_sum_avx2(z.data(), z.size(), tau);
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    case Isa::Neon:
      return detail::excess_sum_neon(z.data(), z.size(), tau);
#endif
    default:
      return detail::excess_sum_scalar(z.data(), z.size(), tau);
  }
}

double excess_sum(std::span<const double> z, double tau) {
  return excess_sum(active_isa(), z, tau);
}

}  // namespace mirrorprox::kernels
