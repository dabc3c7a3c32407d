#include "mirrorprox/core.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "mirrorprox/errors.hpp"

namespace mirrorprox {
namespace {

void require_entropic_domain(const Vector& x, const char* who) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0) || !std::isfinite(x[i])) {
      throw DomainError(std::string(who) + ": entropic map needs nonnegative finite "
                        "coordinates, got " + std::to_string(x[i]) + " at index " +
                        std::to_string(i));
    }
  }
}

void require_finite(const Vector& x, const char* who) {
  if (!x.allFinite()) throw DomainError(std::string(who) + ": non-finite coordinate");
}

double floored(double v) { return std::max(v, kEntropicFloor); }

// Coordinatewise Bregman term of psi; separable for both kinds.
double bregman_term(MirrorKind kind, double u, double x) {
  if (kind == MirrorKind::Euclidean) {
    const double d = u - x;
    return 0.5 * d * d;
  }
  const double xf = floored(x);
  const double plogp = u > 0.0 ? u * std::log(u / xf) : 0.0;
  return plogp - u + xf;
}

}  // namespace

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (x.size() != static_cast<Eigen::Index>(dim()) || !x.allFinite()) return false;
  for (std::size_t b = 0; b < layout_.block_count(); ++b) {
    const auto block = layout_.segment(x, b);
    if (block.minCoeff() < -tol) return false;
    if (std::abs(block.sum() - 1.0) > tol) return false;
  }
  return true;
}

Vector FeasibleSet::uniform_point() const {
  Vector x(static_cast<Eigen::Index>(dim()));
  for (std::size_t b = 0; b < layout_.block_count(); ++b) {
    layout_.segment(x, b).setConstant(1.0 / static_cast<double>(layout_.size(b)));
  }
  return x;
}

double spectral_norm(const Matrix& m, double rel_tol) {
  if (m.size() == 0) return 0.0;
  const Matrix gram = m.transpose() * m;
  // Deterministic start with distinct entries, so it is not orthogonal to the
  // dominant eigenvector for structured matrices.
  Vector v(gram.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i + 1);
  v.normalize();

  double estimate = 0.0;
  constexpr int kMaxIterations = 100000;
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = std::sqrt((m * v).squaredNorm());
    if (std::abs(next - estimate) <= rel_tol * next) return next;
    estimate = next;
  }
  return estimate;
}

double min_symmetric_eigenvalue(const Matrix& m) {
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

VIProblem::VIProblem(FeasibleSet set, Matrix matrix, Vector offset,
                     std::optional<double> lipschitz)
    : set_(std::move(set)), matrix_(std::move(matrix)), offset_(std::move(offset)) {
  const auto dim = static_cast<Eigen::Index>(set_.dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim || offset_.size() != dim) {
    throw ContractViolation("VIProblem: matrix/offset shape does not match the set dimension");
  }
  if (!matrix_.allFinite() || !offset_.allFinite()) {
    throw ValidationError("VIProblem: non-finite mapping coefficients");
  }
  const double min_eig = min_symmetric_eigenvalue(matrix_);
  if (min_eig < -kMonotonicityTolerance) {
    throw ValidationError("VIProblem: mapping is not monotone (min eigenvalue of the "
                          "symmetric part is " + std::to_string(min_eig) + ")");
  }
  const double norm = spectral_norm(matrix_);
  if (lipschitz) {
    if (!(*lipschitz > 0.0) || !std::isfinite(*lipschitz)) {
      throw ValidationError("VIProblem: Lipschitz constant must be positive");
    }
    if (*lipschitz < norm - kLipschitzTolerance) {
      throw ValidationError("VIProblem: Lipschitz constant " + std::to_string(*lipschitz) +
                            " is below the spectral norm " + std::to_string(norm));
    }
    lipschitz_ = *lipschitz;
  } else {
    lipschitz_ = norm > 0.0 ? norm : 1.0;
  }
}

DualPoint eval_mapping(const VIProblem& problem, const Vector& x) {
  if (x.size() != static_cast<Eigen::Index>(problem.dim())) {
    throw ContractViolation("eval_mapping: expected dimension " +
                            std::to_string(problem.dim()) + ", got " +
                            std::to_string(x.size()));
  }
  if (!x.allFinite()) throw ContractViolation("eval_mapping: non-finite point");
  return problem.matrix() * x + problem.offset();
}

const char* to_string(MirrorKind kind) {
  return kind == MirrorKind::Entropic ? "entropic" : "euclidean";
}

double psi(const MirrorMap& map, const Vector& x) {
  if (map.kind == MirrorKind::Euclidean) {
    require_finite(x, "psi");
    return 0.5 * x.squaredNorm();
  }
  require_entropic_domain(x, "psi");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) sum += x[i] * (std::log(floored(x[i])) - 1.0);
  }
  return sum;
}

DualPoint grad_psi(const MirrorMap& map, const Vector& x) {
  if (map.kind == MirrorKind::Euclidean) {
    require_finite(x, "grad_psi");
    return x;
  }
  require_entropic_domain(x, "grad_psi");
  return x.unaryExpr([](double v) { return std::log(floored(v)); });
}

double bregman(const MirrorMap& map, const Vector& u, const Vector& x) {
  if (u.size() != x.size()) throw ContractViolation("bregman: dimension mismatch");
  if (map.kind == MirrorKind::Entropic) {
    require_entropic_domain(u, "bregman");
    require_entropic_domain(x, "bregman");
  } else {
    require_finite(u, "bregman");
    require_finite(x, "bregman");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += bregman_term(map.kind, u[i], x[i]);
  return sum;
}

double fenchel_dual(const MirrorMap& map, const FeasibleSet& set, const DualPoint& xi) {
  if (xi.size() != static_cast<Eigen::Index>(set.dim())) {
    throw ContractViolation("fenchel_dual: dimension mismatch");
  }
  require_finite(xi, "fenchel_dual");
  const BlockLayout& layout = set.layout();
  if (map.kind == MirrorKind::Euclidean) {
    const Vector p = project_product_simplex(xi, layout);
    return xi.dot(p) - 0.5 * p.squaredNorm();
  }
  // Per block: 1 + log sum exp(xi).
  double total = 0.0;
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    const auto block = layout.segment(xi, b);
    const double top = block.maxCoeff();
    total += 1.0 + top + std::log((block.array() - top).exp().sum());
  }
  return total;
}

Vector prox_map(const MirrorMap& map, const FeasibleSet& set, const Vector& x,
                const DualPoint& xi) {
  if (!set.contains(x)) throw ContractViolation("prox_map: x is not in the feasible set");
  if (map.kind == MirrorKind::Entropic) return entropic_update(x, xi, 1.0, set.layout());
  return euclidean_update(x, xi, 1.0, set.layout());
}

double h_u(const MirrorMap& map, const FeasibleSet& set, const Vector& u, const Vector& x) {
  if (!set.contains(u) || !set.contains(x)) {
    throw ContractViolation("h_u: points must lie in the feasible set");
  }
  return grad_psi(map, x).dot(x - u) - psi(map, x);
}

double max_bregman_over_set(const MirrorMap& map, const FeasibleSet& set, const Vector& x) {
  if (!set.contains(x)) {
    throw ContractViolation("max_bregman_over_set: x is not in the feasible set");
  }
  const BlockLayout& layout = set.layout();
  double total = 0.0;
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    const std::size_t off = layout.offset(b);
    const std::size_t n = layout.size(b);
    double best = 0.0;
    for (std::size_t vertex = 0; vertex < n; ++vertex) {
      double value = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = i == vertex ? 1.0 : 0.0;
        value += bregman_term(map.kind, u, x[static_cast<Eigen::Index>(off + i)]);
      }
      best = std::max(best, value);
    }
    total += best;
  }
  return total;
}

}  // namespace mirrorprox
