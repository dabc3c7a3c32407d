#pragma once

// Variational-inequality problem types, mirror maps, and the prox-mapping.
//
// Norms are Euclidean on both the primal and the dual side. All functions are
// pure and may be called concurrently.

#include <optional>
#include <vector>

#include "mirrorprox/geometry.hpp"

namespace mirrorprox {

inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr double kEntropicFloor = 1e-100;
inline constexpr double kMonotonicityTolerance = 1e-10;
inline constexpr double kLipschitzTolerance = 1e-9;
inline constexpr double kSpectralNormTolerance = 1e-10;

// Product of probability simplices.
class FeasibleSet {
public:
  explicit FeasibleSet(BlockLayout layout) : layout_(std::move(layout)) {}
  static FeasibleSet product_of_simplices(std::vector<std::size_t> block_sizes) {
    return FeasibleSet(BlockLayout(std::move(block_sizes)));
  }

  const BlockLayout& layout() const noexcept { return layout_; }
  std::size_t dim() const noexcept { return layout_.dim(); }

  // Each block nonnegative and summing to one, both within `tol`.
  bool contains(const Vector& x, double tol = kFeasibilityTolerance) const;

  // Barycenter of every block.
  Vector uniform_point() const;

  bool operator==(const FeasibleSet& other) const { return layout_ == other.layout_; }

private:
  BlockLayout layout_;
};

// Largest singular value by power iteration on M^T M, stopped when two
// consecutive estimates agree to `rel_tol`.
double spectral_norm(const Matrix& m, double rel_tol = kSpectralNormTolerance);

// Smallest eigenvalue of (M + M^T) / 2.
double min_symmetric_eigenvalue(const Matrix& m);

// VI(X, F) with affine F(x) = M x + c.
class VIProblem {
public:
  // Validates monotonicity and the Lipschitz certificate; throws
  // ValidationError on violation and ContractViolation on shape errors.
  // Without an explicit constant, L is the spectral norm of M (or 1 when M is
  // zero, since any positive constant certifies a constant map).
  VIProblem(FeasibleSet set, Matrix matrix, Vector offset,
            std::optional<double> lipschitz = std::nullopt);

  const FeasibleSet& set() const noexcept { return set_; }
  const BlockLayout& layout() const noexcept { return set_.layout(); }
  std::size_t dim() const noexcept { return set_.dim(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  const Vector& offset() const noexcept { return offset_; }
  double lipschitz() const noexcept { return lipschitz_; }

private:
  FeasibleSet set_;
  Matrix matrix_;
  Vector offset_;
  double lipschitz_ = 1.0;
};

// F(x) = M x + c.
DualPoint eval_mapping(const VIProblem& problem, const Vector& x);

enum class MirrorKind { Entropic, Euclidean };

// Distance-generating function psi. Entropic: sum x (ln x - 1);
// Euclidean: |x|^2 / 2. Both are 1-strongly convex on product simplices.
struct MirrorMap {
  MirrorKind kind = MirrorKind::Euclidean;
  double alpha = 1.0;

  static MirrorMap entropic() { return {MirrorKind::Entropic, 1.0}; }
  static MirrorMap euclidean() { return {MirrorKind::Euclidean, 1.0}; }
};

const char* to_string(MirrorKind kind);

// Entropic maps clamp coordinates in [0, 1e-100) up to the floor before taking
// logarithms; negative or NaN coordinates raise DomainError.
double psi(const MirrorMap& map, const Vector& x);
DualPoint grad_psi(const MirrorMap& map, const Vector& x);

// B(u, x) = psi(u) - psi(x) - <grad psi(x), u - x>.
double bregman(const MirrorMap& map, const Vector& u, const Vector& x);

// max over X of <xi, x> - psi(x).
double fenchel_dual(const MirrorMap& map, const FeasibleSet& set, const DualPoint& xi);

// P_x(xi) = argmin_{y in X} psi(y) + <y, xi - grad psi(x)>.
// Throws ContractViolation if x is not in the set.
Vector prox_map(const MirrorMap& map, const FeasibleSet& set, const Vector& x,
                const DualPoint& xi);

// H_u(x) = Omega_u(grad psi(x)); for x in X the inner maximum is attained at
// x itself, giving <grad psi(x), x - u> - psi(x).
double h_u(const MirrorMap& map, const FeasibleSet& set, const Vector& u, const Vector& x);

// max_{u in X} B(u, x). B(., x) is convex, so the maximum sits at a vertex of
// the product and decomposes per block.
double max_bregman_over_set(const MirrorMap& map, const FeasibleSet& set, const Vector& x);

}  // namespace mirrorprox
