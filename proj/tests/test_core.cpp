#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <random>

#include "mirrorprox/core.hpp"
#include "mirrorprox/errors.hpp"
#include "oracles.hpp"

using namespace mirrorprox;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

const FeasibleSet kSquare = FeasibleSet::product_of_simplices({2, 2});

Matrix pennies_matrix() {
  Matrix m = Matrix::Zero(4, 4);
  m.block(0, 2, 2, 2) << 1, -1, -1, 1;
  m.block(2, 0, 2, 2) << -1, 1, 1, -1;
  return m;
}

// max over Delta_2 x Delta_2 of <xi, z - u> - psi(z), per block by 1-d search.
double omega_u_numeric(const MirrorMap& map, const Vector& u, const Vector& xi) {
  auto ent = [](double v) { return v > 0.0 ? v * (std::log(v) - 1.0) : 0.0; };
  double total = -xi.dot(u);
  for (int b = 0; b < 2; ++b) {
    const double s0 = xi[2 * b], s1 = xi[2 * b + 1];
    auto neg = [&](double a) {
      const double psi_val = map.kind == MirrorKind::Entropic
                                 ? ent(a) + ent(1.0 - a)
                                 : 0.5 * (a * a + (1.0 - a) * (1.0 - a));
      return -(s0 * a + s1 * (1.0 - a) - psi_val);
    };
    total += -neg(oracle::argmin_delta2(neg));
  }
  return total;
}

}  // namespace

TEST_CASE("feasible set membership") {
  CHECK(kSquare.contains(vec({0.5, 0.5, 1.0, 0.0})));
  CHECK_FALSE(kSquare.contains(vec({0.6, 0.5, 1.0, 0.0})));
  CHECK_FALSE(kSquare.contains(vec({-0.1, 1.1, 1.0, 0.0})));
  CHECK_FALSE(kSquare.contains(vec({0.5, 0.5})));
  CHECK((kSquare.uniform_point() - vec({0.5, 0.5, 0.5, 0.5})).norm() == 0.0);
}

TEST_CASE("mapping evaluation examples") {
  const Vector u = kSquare.uniform_point();
  VIProblem zero(kSquare, Matrix::Zero(4, 4), Vector::Zero(4));
  CHECK(eval_mapping(zero, vec({0.2, 0.8, 1, 0})).norm() == 0.0);
  VIProblem identity(kSquare, Matrix::Identity(4, 4), Vector::Zero(4));
  CHECK((eval_mapping(identity, u) - u).norm() == 0.0);
  VIProblem pennies(kSquare, pennies_matrix(), Vector::Zero(4));
  CHECK(eval_mapping(pennies, u).norm() == 0.0);
  CHECK_THROWS_AS(eval_mapping(pennies, vec({0.5, 0.5})), ContractViolation);
}

TEST_CASE("problem validation") {
  Matrix bad = Matrix::Zero(4, 4);
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(VIProblem(kSquare, bad, Vector::Zero(4)), ValidationError);
  CHECK_THROWS_AS(VIProblem(kSquare, Matrix::Identity(4, 4), Vector::Zero(4), 0.5),
                  ValidationError);
  CHECK_THROWS_AS(VIProblem(kSquare, Matrix::Identity(3, 3), Vector::Zero(3)), ContractViolation);
  CHECK(VIProblem(kSquare, Matrix::Identity(4, 4), Vector::Zero(4), 3.0).lipschitz() == 3.0);
  CHECK(VIProblem(kSquare, Matrix::Zero(4, 4), Vector::Ones(4)).lipschitz() == 1.0);
  CHECK(VIProblem(kSquare, pennies_matrix(), Vector::Zero(4)).lipschitz() ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("spectral norm agrees with SVD") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = std::normal_distribution<double>(0, 10)(rng);
    Eigen::JacobiSVD<Matrix> svd(m);
    CHECK(spectral_norm(m) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-8));
  }
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("Lipschitz certificate holds on random pairs") {
  std::mt19937_64 rng(5);
  Matrix m(4, 4);
  for (int i = 0; i < 16; ++i) m.data()[i] = std::normal_distribution<double>(0, 3)(rng);
  m = Matrix(m - m.transpose()) + Matrix::Identity(4, 4);  // monotone
  VIProblem problem(kSquare, m, oracle::random_normal(rng, 4));
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector x = oracle::random_product(rng, {2, 2});
    const Vector y = oracle::random_product(rng, {2, 2});
    const double lhs = (eval_mapping(problem, x) - eval_mapping(problem, y)).norm();
    CHECK(lhs <= problem.lipschitz() * (x - y).norm() + 1e-9);
  }
}

TEST_CASE("mirror map gradients") {
  const Vector u = kSquare.uniform_point();
  CHECK((grad_psi(MirrorMap::euclidean(), u) - u).norm() == 0.0);
  CHECK(grad_psi(MirrorMap::entropic(), Vector::Ones(4)).norm() == 0.0);
  const Vector g = grad_psi(MirrorMap::entropic(), u);
  for (int i = 0; i < 4; ++i) CHECK(g[i] == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("entropic domain handling") {
  const MirrorMap ent = MirrorMap::entropic();
  const Vector corner = vec({1.0, 0.0, 0.0, 1.0});
  CHECK(std::isfinite(psi(ent, corner)));
  CHECK(grad_psi(ent, corner)[1] == doctest::Approx(std::log(kEntropicFloor)));
  CHECK_THROWS_AS(psi(ent, vec({-0.1, 1.1, 0.5, 0.5})), DomainError);
  CHECK_THROWS_AS(grad_psi(ent, vec({std::nan(""), 1.0, 0.5, 0.5})), DomainError);
}

TEST_CASE("bregman divergence examples") {
  const MirrorMap ent = MirrorMap::entropic(), euc = MirrorMap::euclidean();
  const Vector u = kSquare.uniform_point();
  CHECK(bregman(ent, u, u) == 0.0);
  CHECK(bregman(euc, u, u) == 0.0);
  CHECK(bregman(euc, vec({1.0, 0.0}), vec({0.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-15));
  const Vector vertex = vec({1.0, 0.0, 1.0, 0.0});
  // KL(vertex || uniform) per block is ln 2.
  const double kl = 2.0 * (1.0 * std::log(1.0 / 0.5));
  CHECK(bregman(ent, vertex, u) == doctest::Approx(kl).epsilon(1e-14));
  CHECK(bregman(ent, vertex, u) == doctest::Approx(1.3862943611198906).epsilon(1e-14));
}

TEST_CASE("bregman matches its definition and is nonnegative") {
  std::mt19937_64 rng(12);
  for (const MirrorMap& map : {MirrorMap::entropic(), MirrorMap::euclidean()}) {
    for (int trial = 0; trial < 500; ++trial) {
      const Vector u = oracle::random_product(rng, {2, 2});
      const Vector x = oracle::random_product(rng, {2, 2});
      const double def = psi(map, u) - psi(map, x) - grad_psi(map, x).dot(u - x);
      const double b = bregman(map, u, x);
      CHECK(b >= 0.0);
      CHECK(b == doctest::Approx(def).epsilon(1e-9).scale(1.0));
      // 1-strong convexity.
      CHECK(b >= 0.5 * (u - x).squaredNorm() - 1e-12);
    }
  }
}

TEST_CASE("prox mapping examples") {
  const Vector u = kSquare.uniform_point();
  for (const MirrorMap& map : {MirrorMap::entropic(), MirrorMap::euclidean()}) {
    const Vector x = vec({0.2, 0.8, 0.6, 0.4});
    // B(., x) is minimized at x.
    CHECK((prox_map(map, kSquare, x, Vector::Zero(4)) - x).lpNorm<Eigen::Infinity>() < 1e-12);
    // xi = grad psi(x) cancels the linear term, leaving argmin psi.
    CHECK((prox_map(map, kSquare, x, grad_psi(map, x)) - u).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  CHECK((prox_map(MirrorMap::euclidean(), kSquare, u, Vector::Zero(4)) - u).norm() < 1e-15);

  const Vector p = prox_map(MirrorMap::entropic(), kSquare, u, vec({-std::log(2.0), 0, 0, 0}));
  CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.5));
  CHECK(p[3] == doctest::Approx(0.5));
  // Cross-check the first block against a numeric argmin of psi(y) + <y, xi - grad psi(x)>.
  const double a = oracle::argmin_delta2([](double t) {
    return oracle::entropic_objective(t, Eigen::Vector2d(0.5, 0.5),
                                      Eigen::Vector2d(-std::log(2.0), 0.0), 1.0);
  });
  CHECK(a == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

  CHECK_THROWS_AS(prox_map(MirrorMap::entropic(), kSquare, vec({0.7, 0.7, 0.5, 0.5}),
                           Vector::Zero(4)),
                  ContractViolation);
}

TEST_CASE("prox mapping is 1/alpha-Lipschitz in the dual argument") {
  std::mt19937_64 rng(21);
  for (const MirrorMap& map : {MirrorMap::entropic(), MirrorMap::euclidean()}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector x = oracle::random_product(rng, {2, 2});
      const Vector xi1 = oracle::random_normal(rng, 4, 2.0);
      const Vector xi2 = oracle::random_normal(rng, 4, 2.0);
      const double lhs =
          (prox_map(map, kSquare, x, xi1) - prox_map(map, kSquare, x, xi2)).norm();
      CHECK(lhs <= (xi1 - xi2).norm() / map.alpha + 1e-12);
    }
  }
}

TEST_CASE("H_u examples") {
  const Vector u = kSquare.uniform_point();
  const MirrorMap euc = MirrorMap::euclidean();
  CHECK(h_u(euc, kSquare, u, u) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(h_u(euc, kSquare, vec({1, 0, 1, 0}), u) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("H_u equals the numeric maximum of Omega_u at grad psi(x)") {
  std::mt19937_64 rng(99);
  for (const MirrorMap& map : {MirrorMap::entropic(), MirrorMap::euclidean()}) {
    for (int trial = 0; trial < 40; ++trial) {
      Vector x = oracle::random_product(rng, {2, 2});
      x = (x.array() + 0.01).matrix() / 1.02;
      const Vector u = oracle::random_product(rng, {2, 2});
      const double numeric = omega_u_numeric(map, u, grad_psi(map, x));
      CHECK(h_u(map, kSquare, u, x) == doctest::Approx(numeric).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("fenchel dual matches numeric maximum") {
  std::mt19937_64 rng(17);
  const Vector zero = Vector::Zero(4);
  for (const MirrorMap& map : {MirrorMap::entropic(), MirrorMap::euclidean()}) {
    for (int trial = 0; trial < 40; ++trial) {
      const Vector xi = oracle::random_normal(rng, 4, 2.0);
      CHECK(fenchel_dual(map, kSquare, xi) ==
            doctest::Approx(omega_u_numeric(map, zero, xi)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("max Bregman over the set") {
  const MirrorMap ent = MirrorMap::entropic(), euc = MirrorMap::euclidean();
  const Vector u = kSquare.uniform_point();
  CHECK(max_bregman_over_set(ent, kSquare, u) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(max_bregman_over_set(euc, kSquare, u) == doctest::Approx(0.5).epsilon(1e-14));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Vector x = oracle::random_product(rng, {2, 2});
    for (const MirrorMap& map : {ent, euc}) {
      double grid = 0.0;
      for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
          const Vector z = vec({i / 100.0, 1 - i / 100.0, j / 100.0, 1 - j / 100.0});
          grid = std::max(grid, bregman(map, z, x));
        }
      }
      CHECK(max_bregman_over_set(map, kSquare, x) == doctest::Approx(grid).epsilon(1e-12));
    }
  }
}
