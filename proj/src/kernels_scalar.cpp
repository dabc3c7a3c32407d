#include "kernels_impl.hpp"

namespace mirrorprox::kernels::detail {

void affine_gap_values_scalar(const AffineGapKernelArgs& args,
                              const double* points, std::size_t begin,
                              std::size_t count, std::size_t stride,
                              double* out) {
  const std::size_t dim = args.dim;
  const double* m = args.matrix.data();
  for (std::size_t i = begin; i < count; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      double f = args.offset[k];
      for (std::size_t j = 0; j < dim; ++j) {
        f = f + m[k * dim + j] * points[j * stride + i];
      }
      acc = acc + f * (args.anchor[k] - points[k * stride + i]);
    }
    out[i] = acc;
  }
}

double excess_sum_scalar(const double* z, std::size_t n, double tau) {
  double partial[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    for (std::size_t lane = 0; lane < 4; ++lane) {
      const double d = z[i + lane] - tau;
      partial[lane] = partial[lane] + (d > 0.0 ? d : 0.0);
    }
  }
  return combine_partials(partial, z, blocked, n, tau);
}

}  // namespace mirrorprox::kernels::detail
