// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "mirrorprox/gap.hpp"
#include "mirrorprox/geometry.hpp"
#include "mirrorprox/problems.hpp"
#include "mirrorprox/solvers.hpp"
#include "oracles.hpp"

using namespace mirrorprox;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const MirrorMap kMirrors[] = {MirrorMap::entropic(), MirrorMap::euclidean()};

Vector skewed_start() { return Vector{{0.9, 0.1, 0.1, 0.9}}; }

SolverConfig popov(const MirrorMap& map, std::size_t T, DiagnosticsMode mode = DiagnosticsMode::Off) {
  return SolverConfig{Method::Popov, map, std::nullopt, T, {}, {}, mode};
}

Outcome rate_certification() {
  const auto start = std::chrono::steady_clock::now();
  const VIProblem problem = to_problem(generate_game(42, 0.0, 100.0));
  const SampleSet samples = draw_uniform_samples(problem.layout(), kDefaultGapSamples, 0);
  const double L = problem.lipschitz();
  Outcome o{true, ""};
  double worst_ratio = 0.0;
  for (const MirrorMap& map : kMirrors) {
    const Trace trace = run(popov(map, 5000), problem);
    const Vector& x0 = trace.config.x0;
    const double max_b = max_bregman_over_set(map, problem.set(), x0);
    for (std::size_t T : {10u, 100u, 1000u, 5000u}) {
      const double est = estimate_gap_sampling(problem, trace.average(T), samples).value;
      const double bound = 2.0 * L / (static_cast<double>(T) * map.alpha) * max_b;
      o.pass = o.pass && est <= bound;
      worst_ratio = std::max(worst_ratio, est / bound);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.pass = o.pass && secs < 60.0;
  o.detail = fmt("max estimate/bound %.4f, %.2f s", worst_ratio, secs);
  return o;
}

Outcome eps_sum() {
  const VIProblem problem = to_problem(generate_game(42, 0.0, 100.0));
  Outcome o{true, ""};
  for (const MirrorMap& map : kMirrors) {
    SolverConfig config = popov(map, 2000, DiagnosticsMode::Record);
    config.x0 = problem.set().uniform_point();
    config.y0 = skewed_start();
    const Trace trace = run(config, problem);
    double sum = 0.0;
    for (std::size_t t = 1; t < trace.records.size(); ++t) sum += trace.records[t].diagnostics->eps;
    const double L = problem.lipschitz(), g = trace.gamma;
    const double budget = 2.0 * g * g * L * L / map.alpha * (config.y0 - config.x0).squaredNorm();
    o.pass = o.pass && sum <= budget + kEpsSumTolerance;
    o.detail += fmt("%s sum %.6g <= %.6g; ", to_string(map.kind), sum, budget);
  }
  return o;
}

Outcome step_lemmas() {
  const VIProblem problem = to_problem(generate_game(42, 0.0, 100.0));
  Outcome o{true, ""};
  for (const MirrorMap& map : kMirrors) {
    for (bool skewed : {false, true}) {
      SolverConfig config = popov(map, 2000, DiagnosticsMode::Record);
      if (skewed) config.y0 = skewed_start();
      const Trace trace = run(config, problem);
      double worst = 1e300;
      for (const auto& c : check_invariants(trace, problem)) {
        if (c.name == "step-distance-bound" || c.name == "delta-below-eps" ||
            c.name == "eps-upper-bound" || c.name == "optimality-y" || c.name == "optimality-x") {
          o.pass = o.pass && c.status == CheckStatus::Pass;
          worst = std::min(worst, c.worst_slack);
        }
      }
      if (!skewed) o.detail += fmt("%s worst slack %.3g; ", to_string(map.kind), worst);
    }
    cli::run("generate --seed 42 --eig 0 100 -o acc42.vigame");
    const int code = cli::run(std::string("verify acc42.vigame --iters 2000 --mirror ") +
                              to_string(map.kind)).code;
    o.pass = o.pass && code == 0;
    o.detail += fmt("verify exit %d; ", code);
  }
  return o;
}

// From the off-center start ((0.9,0.1),(0.1,0.9)); the criterion asks for
// either mirror, both are reported.
Outcome equilibrium() {
  const VIProblem problem = to_problem(matching_pennies());
  const Vector u = problem.set().uniform_point();
  Outcome o{false, ""};
  for (const MirrorMap& map : kMirrors) {
    SolverConfig config = popov(map, 5000);
    config.x0 = skewed_start();
    config.y0 = skewed_start();
    const Trace trace = run(config, problem);
    const double dist = (trace.average(5000) - u).lpNorm<Eigen::Infinity>();
    const double gap = gap_grid_oracle(problem, trace.average(5000)).value;
    const bool ok = dist < 1e-2 && gap < 1e-3;
    o.pass = o.pass || ok;
    o.detail += fmt("%s dist %.3g gap %.3g (%s); ", to_string(map.kind), dist, gap,
                    ok ? "met" : "not met");
  }
  return o;
}

// Least-squares slope of log(gap) against log(T) with the grid-oracle gap.
Outcome decay_slope() {
  const VIProblem problem = to_problem(generate_game(42, 0.0, 100.0));
  const std::vector<std::size_t> horizons{100, 200, 500, 1000, 2000, 5000, 10000};
  Outcome o{true, ""};
  for (const MirrorMap& map : kMirrors) {
    const Trace trace = run(popov(map, horizons.back()), problem);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool positive = true;
    for (std::size_t T : horizons) {
      const double gap = gap_grid_oracle(problem, trace.average(T)).value;
      positive = positive && gap > 0.0;
      const double lx = std::log(static_cast<double>(T)), ly = std::log(gap);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double n = static_cast<double>(horizons.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    o.pass = o.pass && positive && slope <= -0.8;
    o.detail += fmt("%s slope %.4f; ", to_string(map.kind), slope);
  }
  return o;
}

Outcome map_evals() {
  const VIProblem problem = to_problem(generate_game(42, 0.0, 100.0));
  Outcome o{true, ""};
  for (std::size_t T : {1u, 100u, 2000u}) {
    SolverConfig config = popov(MirrorMap::entropic(), T);
    const std::size_t p = run(config, problem).map_evals;
    config.method = Method::Korpelevich;
    const std::size_t k = run(config, problem).map_evals;
    o.pass = o.pass && p == T + 1 && k == 2 * T;
    o.detail += fmt("T=%zu: %zu vs %zu; ", T, p, k);
  }
  return o;
}

Outcome geometry_oracles() {
  std::mt19937_64 rng(7);
  double worst_proj = 0.0;
  for (std::size_t n : {2u, 3u, 10u}) {
    for (int i = 0; i < 1000; ++i) {
      const Vector z = oracle::random_normal(rng, n, 3.0);
      worst_proj = std::max(worst_proj, (project_simplex_bisection(z) - oracle::sort_projection(z))
                                            .lpNorm<Eigen::Infinity>());
    }
  }
  double worst_ent = 0.0;
  const BlockLayout layout({2});
  std::uniform_real_distribution<double> gamma_dist(0.01, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d x = (oracle::random_simplex(rng, 2).array() + 0.02).matrix() / 1.04;
    const Eigen::Vector2d g = oracle::random_normal(rng, 2, 2.0);
    const double gamma = gamma_dist(rng);
    const double a = oracle::argmin_delta2(
        [&](double t) { return oracle::entropic_objective(t, x, g, gamma); });
    worst_ent = std::max(worst_ent, std::abs(entropic_update(x, g, gamma, layout)[0] - a));
  }
  return {worst_proj < 1e-8 && worst_ent < 1e-6,
          fmt("projection %.3g, entropic %.3g", worst_proj, worst_ent)};
}

Outcome determinism() {
  const auto dir = cli::scratch_dir();
  bool ok = true;
  ok = ok && cli::run("generate --seed 42 --eig 0 100 -o det_a.vigame").code == 0;
  ok = ok && cli::run("generate --seed 42 --eig 0 100 -o det_b.vigame").code == 0;
  const bool files = ok && cli::slurp(dir / "det_a.vigame") == cli::slurp(dir / "det_b.vigame");
  const std::string args = "solve det_a.vigame --seed 7 --iters 1000 --mirror euclidean ";
  ok = ok && cli::run(args + "-o det_run_a").code == 0;
  ok = ok && cli::run(args + "--threads 4 -o det_run_b").code == 0;
  const std::string a = cli::slurp(dir / "det_run_a" / "trace.csv");
  const bool traces = ok && !a.empty() && a == cli::slurp(dir / "det_run_b" / "trace.csv");
  return {ok && files && traces, fmt("problem files %s, trace CSVs %s", files ? "identical" : "differ",
                                     traces ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"rate certification", rate_certification},
      {"eps-sum inequality", eps_sum},
      {"per-step inequality suite", step_lemmas},
      {"equilibrium convergence", equilibrium},
      {"O(1/T) decay shape", decay_slope},
      {"mapping-evaluation economy", map_evals},
      {"geometry oracles", geometry_oracles},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s  %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
