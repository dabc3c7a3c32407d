#include "mirrorprox/experiment.hpp"

#include <cmath>
#include <limits>

#include "mirrorprox/errors.hpp"

namespace mirrorprox {

ExperimentResult run_experiment(const ExperimentOptions& options, const VIProblem& problem) {
  if (options.gap_every == 0) throw ContractViolation("gap cadence must be at least 1");
  ExperimentResult result;
  result.trace = run(options.solver, problem);
  const Trace& trace = result.trace;
  const SolverConfig& config = trace.config;

  TraceTable& table = result.table;
  table.meta["method"] = to_string(config.method);
  table.meta["mirror"] = to_string(config.mirror.kind);
  table.meta["gamma"] = format_real(trace.gamma);
  table.meta["lipschitz"] = format_real(trace.lipschitz);
  table.meta["iters"] = std::to_string(config.max_iters);
  table.meta["seed"] = std::to_string(options.seed);
  table.meta["gap_samples"] = std::to_string(options.gap_samples);
  if (!options.problem_name.empty()) table.meta["problem"] = options.problem_name;

  const bool bounded = config.method == Method::Popov &&
                       trace.gamma <= config.mirror.alpha / (2.0 * trace.lipschitz) * (1.0 + 1e-12);
  const std::size_t total = trace.iterations();
  if (total == 0) return result;

  const SampleSet samples =
      draw_uniform_samples(problem.layout(), options.gap_samples, options.seed, options.workers);
  const bool grid_capable = problem.layout().sizes() == std::vector<std::size_t>{2, 2};

  double elapsed_ms = 0.0;
  std::size_t accounted = 0;
  auto emit = [&](std::size_t t, const GapEstimate& gap) {
    for (; accounted < t; ++accounted) elapsed_ms += trace.records[accounted + 1].wall_ms;
    TraceRow row;
    row.iter = t;
    row.gap_estimate = gap.value;
    row.gap_method = to_string(gap.method);
    row.bound = bounded ? rate_bound(problem, config.mirror, trace.gamma, t - 1, config.x0, config.y0)
                        : std::numeric_limits<double>::quiet_NaN();
    row.map_evals = trace.records[t].map_evals;
    row.wall_ms = options.record_time ? elapsed_ms : 0.0;
    table.rows.push_back(std::move(row));
  };

  for (std::size_t t = options.gap_every; t <= total; t += options.gap_every) {
    emit(t, estimate_gap_sampling(problem, trace.average(t), samples, options.workers));
  }
  if (total % options.gap_every != 0) {
    emit(total, estimate_gap_sampling(problem, trace.average(total), samples, options.workers));
  }
  if (grid_capable) {
    emit(total, gap_grid_oracle(problem, trace.average(total), GridOptions{options.grid_step, true}));
  }
  return result;
}

}  // namespace mirrorprox
