#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#define MIRRORPROX_AVX2 __attribute__((target("avx2")))

namespace mirrorprox::kernels::detail {

MIRRORPROX_AVX2 void affine_gap_values_avx2(const AffineGapKernelArgs& args,
                                            const double* points,
                                            std::size_t count,
                                            std::size_t stride, double* out) {
  const std::size_t dim = args.dim;
  const double* m = args.matrix.data();
  const std::size_t blocked = count - count % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      __m256d f = _mm256_set1_pd(args.offset[k]);
      for (std::size_t j = 0; j < dim; ++j) {
        const __m256d u = _mm256_loadu_pd(points + j * stride + i);
        f = _mm256_add_pd(f, _mm256_mul_pd(_mm256_set1_pd(m[k * dim + j]), u));
      }
      const __m256d uk = _mm256_loadu_pd(points + k * stride + i);
      const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(args.anchor[k]), uk);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(f, diff));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  affine_gap_values_scalar(args, points, blocked, count, stride, out);
}

MIRRORPROX_AVX2 double excess_sum_avx2(const double* z, std::size_t n,
                                       double tau) {
  const std::size_t blocked = n - n % 4;
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(z + i), vtau);
    // max(d, 0) with the scalar semantics "d > 0 ? d : 0"
    const __m256d pos = _mm256_and_pd(d, _mm256_cmp_pd(d, zero, _CMP_GT_OQ));
    acc = _mm256_add_pd(acc, pos);
  }
  alignas(32) double partial[4];
  _mm256_store_pd(partial, acc);
  return combine_partials(partial, z, blocked, n, tau);
}

}  // namespace mirrorprox::kernels::detail

#endif
