#include "mirrorprox/gap.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <span>
#include <thread>

#include "mirrorprox/errors.hpp"
#include "mirrorprox/kernels.hpp"

namespace mirrorprox {
namespace {

struct Candidate {
  double value = 0.0;
  std::size_t index = 0;
  bool found = false;  // false: the anchor is still the best
};

// Runs `body(chunk)` for every chunk, chunk c on worker c % workers.
template <class Body>
void for_each_chunk(std::size_t chunks, unsigned workers, Body&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) body(c);
    });
  }
}

kernels::AffineGapKernelArgs kernel_args(const VIProblem& problem, const Matrix& row_major_storage,
                                         const Vector& x) {
  const std::size_t dim = problem.dim();
  return {std::span<const double>(row_major_storage.data(), dim * dim),
          std::span<const double>(problem.offset().data(), dim),
          std::span<const double>(x.data(), dim), dim};
}

// Eigen is column-major; the kernel wants M row-major, i.e. M^T column-major.
Matrix row_major(const Matrix& m) { return m.transpose(); }

void require_point(const VIProblem& problem, const Vector& x, const char* who) {
  if (!problem.set().contains(x)) {
    throw ContractViolation(std::string(who) + ": x is not in the feasible set");
  }
}

double gap_objective(const VIProblem& problem, const Vector& x, const Vector& u) {
  return eval_mapping(problem, u).dot(x - u);
}

}  // namespace

const char* to_string(GapMethod method) {
  return method == GapMethod::Sampling ? "sampling" : "grid";
}

Vector SampleSet::point(std::size_t i) const {
  if (i >= count) throw ContractViolation("SampleSet::point: index out of range");
  Vector u(static_cast<Eigen::Index>(layout.dim()));
  for (std::size_t k = 0; k < layout.dim(); ++k) u[static_cast<Eigen::Index>(k)] = coords[k * count + i];
  return u;
}

SampleSet draw_uniform_samples(const BlockLayout& layout, std::size_t count,
                               std::uint64_t seed, unsigned workers) {
  if (count == 0) throw ContractViolation("draw_uniform_samples: need at least one sample");
  SampleSet set{layout, count, seed, std::vector<double>(layout.dim() * count)};
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;

  for_each_chunk(chunks, workers, [&](std::size_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(count, begin + kSampleChunk);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t b = 0; b < layout.block_count(); ++b) {
        const std::size_t off = layout.offset(b);
        const std::size_t n = layout.size(b);
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double uniform = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
          const double spacing = -std::log1p(-uniform);
          set.coords[(off + j) * count + i] = spacing;
          total += spacing;
        }
        for (std::size_t j = 0; j < n; ++j) {
          double& c = set.coords[(off + j) * count + i];
          c = total > 0.0 ? c / total : 1.0 / static_cast<double>(n);
        }
      }
    }
  });
  return set;
}

GapEstimate estimate_gap_sampling(const VIProblem& problem, const Vector& x,
                                  const SampleSet& samples, unsigned workers) {
  require_point(problem, x, "estimate_gap_sampling");
  if (!(samples.layout == problem.layout())) {
    throw ContractViolation("estimate_gap_sampling: samples drawn for a different set");
  }
  const Matrix m = row_major(problem.matrix());
  const auto args = kernel_args(problem, m, x);
  const std::size_t count = samples.count;
  const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
  const std::span<const double> coords(samples.coords);

  std::vector<Candidate> best(chunks);
  for_each_chunk(chunks, workers, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t n = std::min(count, begin + kSampleChunk) - begin;
    std::vector<double> values(n);
    kernels::affine_gap_values(args, coords.subspan(begin), n, count, values);
    Candidate local;
    for (std::size_t i = 0; i < n; ++i) {
      if (!local.found || values[i] > local.value) local = {values[i], begin + i, true};
    }
    best[chunk] = local;
  });

  GapEstimate estimate;
  estimate.method = GapMethod::Sampling;
  estimate.samples = count;
  estimate.seed = samples.seed;
  estimate.value = 0.0;
  estimate.argmax_u = x;
  for (const Candidate& c : best) {
    if (c.found && c.value > estimate.value) {
      estimate.value = c.value;
      estimate.argmax_u = samples.point(c.index);
    }
  }
  return estimate;
}

GapEstimate estimate_gap_sampling(const VIProblem& problem, const Vector& x,
                                  std::size_t count, std::uint64_t seed, unsigned workers) {
  return estimate_gap_sampling(problem, x,
                               draw_uniform_samples(problem.layout(), count, seed, workers),
                               workers);
}

GapEstimate gap_grid_oracle(const VIProblem& problem, const Vector& x,
                            const GridOptions& options) {
  if (problem.layout().sizes() != std::vector<std::size_t>{2, 2}) {
    throw ContractViolation("gap_grid_oracle: requires exactly two 2-dimensional blocks");
  }
  if (!(options.step > 0.0) || options.step > 1.0) {
    throw ContractViolation("gap_grid_oracle: step must lie in (0, 1]");
  }
  require_point(problem, x, "gap_grid_oracle");

  const auto intervals = static_cast<std::size_t>(std::ceil(1.0 / options.step - 1e-9));
  const std::size_t n = intervals + 1;
  auto level = [&](std::size_t i) {
    return i == intervals ? 1.0 : static_cast<double>(i) * options.step;
  };

  const Matrix m = row_major(problem.matrix());
  const auto args = kernel_args(problem, m, x);
  std::vector<double> row(4 * n);
  std::vector<double> values(n);
  for (std::size_t j = 0; j < n; ++j) {
    row[2 * n + j] = level(j);
    row[3 * n + j] = 1.0 - level(j);
  }

  GapEstimate estimate;
  estimate.method = GapMethod::Grid;
  estimate.grid_step = options.step;
  estimate.value = 0.0;
  estimate.argmax_u = x;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n), level(i));
    std::fill(row.begin() + static_cast<std::ptrdiff_t>(n),
              row.begin() + static_cast<std::ptrdiff_t>(2 * n), 1.0 - level(i));
    kernels::affine_gap_values(args, row, n, n, values);
    for (std::size_t j = 0; j < n; ++j) {
      if (values[j] > estimate.value) {
        estimate.value = values[j];
        estimate.argmax_u = Vector{{level(i), 1.0 - level(i), level(j), 1.0 - level(j)}};
      }
    }
  }
  if (!options.polish) return estimate;

  // q(a, b) = <F(u), x - u> is a concave quadratic on [0,1]^2. Its maximizer
  // is a corner, an edge critical point, or the interior critical point.
  auto at = [](double a, double b) { return Vector{{a, 1.0 - a, b, 1.0 - b}}; };
  auto q = [&](double a, double b) { return gap_objective(problem, x, at(a, b)); };
  // Second-order model around the corner (0, 0): q = q0 + g.s - s^T H s.
  Eigen::Matrix<double, 4, 2> e;
  e << 1, 0, -1, 0, 0, 1, 0, -1;
  const Eigen::Matrix2d h = 0.5 * (e.transpose() * problem.matrix() * e +
                                   (e.transpose() * problem.matrix() * e).transpose());
  const Vector u0 = at(0.0, 0.0);
  const Eigen::Vector2d g = e.transpose() * (problem.matrix().transpose() * (x - u0)) -
                            e.transpose() * eval_mapping(problem, u0);

  std::vector<std::array<double, 2>> candidates = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto edge_max = [](double linear, double curvature) {
    // argmax over [0,1] of linear*s - curvature*s^2, curvature >= 0
    if (curvature <= 0.0) return linear > 0.0 ? 1.0 : 0.0;
    return std::clamp(linear / (2.0 * curvature), 0.0, 1.0);
  };
  for (double fixed : {0.0, 1.0}) {
    // a free, b fixed; then b free, a fixed
    candidates.push_back({edge_max(g[0] - 2.0 * h(0, 1) * fixed, h(0, 0)), fixed});
    candidates.push_back({fixed, edge_max(g[1] - 2.0 * h(0, 1) * fixed, h(1, 1))});
  }
  if (std::abs(h.determinant()) > 1e-14 * std::max(1.0, h.squaredNorm())) {
    const Eigen::Vector2d s = h.ldlt().solve(0.5 * g);
    if (s.allFinite() && (s.array() >= 0.0).all() && (s.array() <= 1.0).all()) {
      candidates.push_back({s[0], s[1]});
    }
  }
  for (const auto& [a, b] : candidates) {
    const double value = q(a, b);
    if (value > estimate.value) {
      estimate.value = value;
      estimate.argmax_u = at(a, b);
    }
  }
  return estimate;
}

double rate_bound(const VIProblem& problem, const MirrorMap& map, double gamma,
                  std::size_t T, const Vector& x0, const Vector& y0) {
  const double lip = problem.lipschitz();
  const double alpha = map.alpha;
  if (!(gamma > 0.0) || gamma > alpha / (2.0 * lip) * (1.0 + 1e-12)) {
    throw ContractViolation("rate_bound: requires 0 < gamma <= alpha/(2L)");
  }
  if (!problem.set().contains(y0)) {
    throw ContractViolation("rate_bound: y0 is not in the feasible set");
  }
  const double steps = static_cast<double>(T) + 1.0;
  const double divergence = max_bregman_over_set(map, problem.set(), x0);
  return divergence / (steps * gamma) +
         2.0 * gamma * lip * lip / (steps * alpha) * (y0 - x0).squaredNorm();
}

}  // namespace mirrorprox
