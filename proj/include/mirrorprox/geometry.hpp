#pragma once

// Update rules on products of probability simplices.

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace mirrorprox {

using Vector = Eigen::VectorXd;     // primal point
using DualPoint = Eigen::VectorXd;  // element of the dual space
using Matrix = Eigen::MatrixXd;

// Contiguous simplex blocks covering a flat vector.
class BlockLayout {
public:
  // Throws ContractViolation on an empty list or a zero-sized block.
  explicit BlockLayout(std::vector<std::size_t> sizes);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t block_count() const noexcept { return sizes_.size(); }
  std::size_t offset(std::size_t block) const { return offsets_.at(block); }
  std::size_t size(std::size_t block) const { return sizes_.at(block); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  auto segment(Vector& v, std::size_t block) const {
    return v.segment(static_cast<Eigen::Index>(offset(block)),
                     static_cast<Eigen::Index>(size(block)));
  }
  auto segment(const Vector& v, std::size_t block) const {
    return v.segment(static_cast<Eigen::Index>(offset(block)),
                     static_cast<Eigen::Index>(size(block)));
  }

  bool operator==(const BlockLayout& other) const { return sizes_ == other.sizes_; }

private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
};

inline constexpr double kBisectionTolerance = 1e-12;
inline constexpr int kBisectionMaxIterations = 200;

// Euclidean projection onto the probability simplex. Bisection on the
// threshold tau of sum_i max(z_i - tau, 0) = 1 over [min(z) - 1, max(z)];
// the thresholded vector is renormalized so it sums to one.
Vector project_simplex_bisection(const Eigen::Ref<const Vector>& z);

// Blockwise projection onto the product of simplices.
Vector project_product_simplex(const Vector& z, const BlockLayout& layout);

// w = x * exp(-gamma * g), each block divided by its own sum.
// Throws NumericalDegeneracy if a block sum underflows to zero or overflows.
Vector entropic_update(const Vector& x, const DualPoint& g, double gamma,
                       const BlockLayout& layout);

// Projection of x - gamma * g onto the product of simplices.
Vector euclidean_update(const Vector& x, const DualPoint& g, double gamma,
                        const BlockLayout& layout);

}  // namespace mirrorprox
