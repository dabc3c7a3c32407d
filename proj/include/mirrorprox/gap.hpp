#pragma once

// Dual-gap certification: G(x) = max_{u in X} <F(u), x - u>.
//
// Every estimator maximizes over a subset of X, so each one is a lower bound
// on the true gap. The anchor u = x (objective exactly 0) is always a
// candidate, which keeps estimates nonnegative.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mirrorprox/core.hpp"

namespace mirrorprox {

inline constexpr std::size_t kDefaultGapSamples = 200000;
inline constexpr double kDefaultGridStep = 1e-3;

enum class GapMethod { Sampling, Grid };

const char* to_string(GapMethod method);

struct GapEstimate {
  double value = 0.0;
  GapMethod method = GapMethod::Sampling;
  std::size_t samples = 0;  // sampling only
  std::uint64_t seed = 0;   // sampling only
  double grid_step = 0.0;   // grid only
  Vector argmax_u;
};

// Points drawn uniformly from a product of simplices, stored
// coordinate-major (coordinate k of sample i at coords[k * count + i]).
//
// Samples are generated in fixed chunks of kSampleChunk points, each from its
// own generator seeded by (seed, chunk index), so the set does not depend on
// the number of workers.
struct SampleSet {
  BlockLayout layout;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> coords;

  Vector point(std::size_t i) const;
};

inline constexpr std::size_t kSampleChunk = 8192;

// Per-block uniform Dirichlet(1, ..., 1) via normalized exponential spacings.
// Throws ContractViolation when count == 0.
SampleSet draw_uniform_samples(const BlockLayout& layout, std::size_t count,
                               std::uint64_t seed, unsigned workers = 1);

// Max of <F(u), x - u> over the samples (and the anchor x). Ties go to the
// lowest sample index; the result is identical for any worker count.
GapEstimate estimate_gap_sampling(const VIProblem& problem, const Vector& x,
                                  const SampleSet& samples, unsigned workers = 1);
GapEstimate estimate_gap_sampling(const VIProblem& problem, const Vector& x,
                                  std::size_t count, std::uint64_t seed,
                                  unsigned workers = 1);

struct GridOptions {
  double step = kDefaultGridStep;
  // Also evaluate the exact maximizer of the concave objective over the
  // parameter box, so the result dominates every feasible sample.
  bool polish = true;
};

// For two 2-dimensional blocks: u = (a, 1-a, b, 1-b) with a, b on the grid
// {0, step, ..., 1}. Throws ContractViolation for any other block structure.
GapEstimate gap_grid_oracle(const VIProblem& problem, const Vector& x,
                            const GridOptions& options = {});

// Right-hand side of the averaged-iterate rate bound for the Popov method
// after T+1 steps:
//   max_u B(u, x0) / ((T+1) gamma) + 2 gamma L^2 / ((T+1) alpha) |y0 - x0|^2,
// which for gamma = alpha/(2L) reads
//   2L/((T+1) alpha) max_u B(u, x0) + L/(T+1) |y0 - x0|^2.
// Requires 0 < gamma <= alpha/(2L).
double rate_bound(const VIProblem& problem, const MirrorMap& map, double gamma,
                     std::size_t T, const Vector& x0, const Vector& y0);

}  // namespace mirrorprox
