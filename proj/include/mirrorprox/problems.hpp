#pragma once

// Two-player matrix games over Delta_2 x Delta_2 and their `.vigame` files.
//
//   player 1: min_{x1} <x1, A x1> + <x1, B x2> + <p, x1>
//   player 2: min_{x2} <x2, C x2> + <x1, D x2> + <q, x2>
//
// Stacking the players' loss gradients gives the affine VI mapping
//   F(x) = [[A + A^T, B], [D^T, C + C^T]] x + [p; q].

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "mirrorprox/core.hpp"

namespace mirrorprox {

inline constexpr double kSpectrumTolerance = 1e-8;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  std::uint64_t seed = 0;
  double eig_lo = 0.0;
  double eig_hi = 0.0;
  double l_computed = 0.0;

  bool operator==(const ProblemSpec& other) const;
};

Eigen::Matrix4d jacobian(const ProblemSpec& spec);
Eigen::Vector4d offset(const ProblemSpec& spec);

double player_one_loss(const ProblemSpec& spec, const Eigen::Vector2d& x1, const Eigen::Vector2d& x2);
double player_two_loss(const ProblemSpec& spec, const Eigen::Vector2d& x1, const Eigen::Vector2d& x2);

// Throws ValidationError when the symmetric part of the Jacobian leaves
// [eig_lo - 1e-8, eig_hi + 1e-8] or l_computed is not its spectral norm.
void validate(const ProblemSpec& spec);

// VI over Delta_2 x Delta_2 with L = l_computed (1 for the zero Jacobian).
VIProblem to_problem(const ProblemSpec& spec);

// Jacobian J = Q diag(lambda) Q^T + K with Q Haar-orthogonal, lambda_i uniform
// in [lo, hi] and K skew-symmetric, supported on the off-diagonal player
// blocks, with spectral norm hi/2. p and q are standard normal.
// Throws ContractViolation unless 0 <= lo <= hi.
ProblemSpec generate_game(std::uint64_t seed, double eig_lo, double eig_hi);

// Zero-sum bilinear game with the uniform equilibrium.
ProblemSpec matching_pennies();

// F identically zero.
ProblemSpec zero_game();

std::string to_text(const ProblemSpec& spec);
// Throws ParseError (naming the field) or ValidationError.
ProblemSpec from_text(const std::string& text);

// Throw IoError when the file cannot be written or read.
void save_spec(const std::filesystem::path& path, const ProblemSpec& spec);
ProblemSpec load_spec(const std::filesystem::path& path);

}  // namespace mirrorprox
