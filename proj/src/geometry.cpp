#include "mirrorprox/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>

#include "mirrorprox/errors.hpp"
#include "mirrorprox/kernels.hpp"

namespace mirrorprox {
namespace {

void check_operands(const Vector& x, const DualPoint& g, double gamma,
                    const BlockLayout& layout, const char* who) {
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  if (x.size() != dim || g.size() != dim) {
    throw ContractViolation(std::string(who) + ": dimension mismatch");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ContractViolation(std::string(who) + ": step size must be positive");
  }
  if (!x.allFinite() || !g.allFinite()) {
    throw ContractViolation(std::string(who) + ": non-finite operand");
  }
}

}  // namespace

BlockLayout::BlockLayout(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ContractViolation("BlockLayout: no blocks");
  offsets_.reserve(sizes_.size());
  for (std::size_t s : sizes_) {
    if (s == 0) throw ContractViolation("BlockLayout: empty block");
    offsets_.push_back(dim_);
    dim_ += s;
  }
}

Vector project_simplex_bisection(const Eigen::Ref<const Vector>& z) {
  if (z.size() == 0) throw ContractViolation("project_simplex_bisection: empty block");
  if (!z.allFinite()) {
    throw ContractViolation("project_simplex_bisection: non-finite coordinate");
  }
  const Vector block = z;  // contiguous copy for the kernel
  const std::span<const double> values(block.data(), static_cast<std::size_t>(block.size()));

  // excess(lo) >= 1 holds for the initial bracket and is kept as an invariant,
  // so thresholding at lo never produces an all-zero block.
  double lo = block.minCoeff() - 1.0;
  double hi = block.maxCoeff();
  for (int it = 0; it < kBisectionMaxIterations && hi - lo >= kBisectionTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kernels::excess_sum(values, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Recompute the threshold exactly from the support found at lo; keep lo if
  // the closed form is inconsistent with that support.
  double tau = lo;
  double support_sum = 0.0;
  double support_min = std::numeric_limits<double>::infinity();
  double outside_max = -std::numeric_limits<double>::infinity();
  Eigen::Index support = 0;
  for (double v : values) {
    if (v > lo) {
      support_sum += v;
      support_min = std::min(support_min, v);
      ++support;
    } else {
      outside_max = std::max(outside_max, v);
    }
  }
  const double exact = (support_sum - 1.0) / static_cast<double>(support);
  if (support_min > exact && outside_max <= exact) tau = exact;

  Vector p = (block.array() - tau).max(0.0).matrix();
  p /= p.sum();
  return p;
}

Vector project_product_simplex(const Vector& z, const BlockLayout& layout) {
  if (z.size() != static_cast<Eigen::Index>(layout.dim())) {
    throw ContractViolation("project_product_simplex: dimension mismatch");
  }
  Vector out(z.size());
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    layout.segment(out, b) = project_simplex_bisection(layout.segment(z, b));
  }
  return out;
}

Vector entropic_update(const Vector& x, const DualPoint& g, double gamma,
                       const BlockLayout& layout) {
  check_operands(x, g, gamma, layout, "entropic_update");
  if ((x.array() < 0.0).any()) {
    throw ContractViolation("entropic_update: negative coordinate");
  }
  Vector w = (x.array() * (-gamma * g.array()).exp()).matrix();
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    auto block = layout.segment(w, b);
    const double sum = block.sum();
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      throw NumericalDegeneracy("entropic_update: block " + std::to_string(b) +
                                " normalization factor is degenerate");
    }
    block /= sum;
  }
  return w;
}

Vector euclidean_update(const Vector& x, const DualPoint& g, double gamma,
                        const BlockLayout& layout) {
  check_operands(x, g, gamma, layout, "euclidean_update");
  return project_product_simplex(x - gamma * g, layout);
}

}  // namespace mirrorprox
