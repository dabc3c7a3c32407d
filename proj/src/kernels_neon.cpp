#include "kernels_impl.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

namespace mirrorprox::kernels::detail {

// Two float64x2 registers cover the four lanes of the scalar reference.
void affine_gap_values_neon(const AffineGapKernelArgs& args,
                            const double* points, std::size_t count,
                            std::size_t stride, double* out) {
  const std::size_t dim = args.dim;
  const double* m = args.matrix.data();
  const std::size_t blocked = count - count % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    float64x2_t acc_lo = vdupq_n_f64(0.0);
    float64x2_t acc_hi = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      float64x2_t f_lo = vdupq_n_f64(args.offset[k]);
      float64x2_t f_hi = f_lo;
      for (std::size_t j = 0; j < dim; ++j) {
        const float64x2_t coef = vdupq_n_f64(m[k * dim + j]);
        const double* u = points + j * stride + i;
        f_lo = vaddq_f64(f_lo, vmulq_f64(coef, vld1q_f64(u)));
        f_hi = vaddq_f64(f_hi, vmulq_f64(coef, vld1q_f64(u + 2)));
      }
      const float64x2_t xk = vdupq_n_f64(args.anchor[k]);
      const double* uk = points + k * stride + i;
      acc_lo = vaddq_f64(acc_lo, vmulq_f64(f_lo, vsubq_f64(xk, vld1q_f64(uk))));
      acc_hi =
          vaddq_f64(acc_hi, vmulq_f64(f_hi, vsubq_f64(xk, vld1q_f64(uk + 2))));
    }
    vst1q_f64(out + i, acc_lo);
    vst1q_f64(out + i + 2, acc_hi);
  }
  affine_gap_values_scalar(args, points, blocked, count, stride, out);
}

double excess_sum_neon(const double* z, std::size_t n, double tau) {
  const std::size_t blocked = n - n % 4;
  const float64x2_t vtau = vdupq_n_f64(tau);
  const float64x2_t zero = vdupq_n_f64(0.0);
  float64x2_t acc_lo = zero;
  float64x2_t acc_hi = zero;
  for (std::size_t i = 0; i < blocked; i += 4) {
    const float64x2_t d_lo = vsubq_f64(vld1q_f64(z + i), vtau);
    const float64x2_t d_hi = vsubq_f64(vld1q_f64(z + i + 2), vtau);
    acc_lo = vaddq_f64(acc_lo, vbslq_f64(vcgtq_f64(d_lo, zero), d_lo, zero));
    acc_hi = vaddq_f64(acc_hi, vbslq_f64(vcgtq_f64(d_hi, zero), d_hi, zero));
  }
  double partial[4];
  vst1q_f64(partial, acc_lo);
  vst1q_f64(partial + 2, acc_hi);
  return combine_partials(partial, z, blocked, n, tau);
}

}  // namespace mirrorprox::kernels::detail

#endif
