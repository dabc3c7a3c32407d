#include "mirrorprox/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "mirrorprox/errors.hpp"

namespace mirrorprox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min over the block vertices and the iterate itself of <g, z - point>.
double optimality_residual(const DualPoint& g, const Vector& point, const BlockLayout& layout) {
  double vertex_term = 0.0;
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    vertex_term += layout.segment(g, b).minCoeff();
  }
  return std::min(0.0, vertex_term - g.dot(point));
}

double feasibility_violation(const Vector& x, const BlockLayout& layout) {
  if (!x.allFinite()) return kInf;
  double worst = 0.0;
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    const auto block = layout.segment(x, b);
    worst = std::max(worst, -block.minCoeff());
    worst = std::max(worst, std::abs(block.sum() - 1.0));
  }
  return worst;
}

bool eps_sum_applicable(const Trace& trace) {
  const double limit = trace.config.mirror.alpha / (2.0 * trace.lipschitz);
  return trace.config.method == Method::Popov && trace.gamma > 0.0 &&
         trace.gamma <= limit * (1.0 + 1e-12);
}

// Incremental evaluation of the invariant suite, shared by strict runs and
// post-hoc checking.
class InvariantTracker {
public:
  InvariantTracker(const Trace& trace, const VIProblem& problem)
      : layout_(problem.layout()), has_diagnostics_(trace.config.diagnostics != DiagnosticsMode::Off),
        eps_sum_applicable_(eps_sum_applicable(trace)) {
    const double gamma = trace.gamma;
    const double lip = trace.lipschitz;
    const double alpha = trace.config.mirror.alpha;
    eps_sum_budget_ = 2.0 * gamma * gamma * lip * lip / alpha *
                      (trace.config.y0 - trace.config.x0).squaredNorm();
    y_sum_ = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(trace.config.y0.size());

    auto add = [this](const char* name, double tol) {
      checks_.push_back({name, CheckStatus::Pass, kInf, 0, {}});
      tolerances_.push_back(tol);
    };
    add("feasibility", kFeasibilityTolerance);
    add("average-consistency", kAverageTolerance);
    add("step-distance-bound", kDistanceTolerance);
    add("prox-contraction", kDistanceTolerance);
    add("delta-below-eps", kDeltaEpsTolerance);
    add("eps-upper-bound", kEpsBoundTolerance);
    add("optimality-y", kResidualTolerance);
    add("optimality-x", kResidualTolerance);
    add("eps-sum-bound", kEpsSumTolerance);

    if (!has_diagnostics_) {
      for (std::size_t i = kFirstDiagnostic; i < checks_.size(); ++i) {
        checks_[i].status = CheckStatus::NotApplicable;
        checks_[i].note = "diagnostics were not recorded";
      }
    } else if (!eps_sum_applicable_) {
      checks_[kEpsSum].status = CheckStatus::NotApplicable;
      checks_[kEpsSum].note = "requires Popov with 0 < gamma <= alpha/(2L)";
    } else {
      checks_[kEpsSum].note = "budget " + std::to_string(eps_sum_budget_);
    }
  }

  // Returns false once any applicable invariant has failed.
  bool observe(std::size_t t, const IterateRecord& record) {
    observe_slack(kFeasibility, t,
                  -std::max(feasibility_violation(record.x, layout_),
                            feasibility_violation(record.y, layout_)));
    if (t > 0) {
      y_sum_ += record.y.cast<long double>();
      const Vector exact = (y_sum_ / static_cast<long double>(t)).cast<double>();
      observe_slack(kAverage, t, -(record.average - exact).cwiseAbs().maxCoeff());
    }
    if (has_diagnostics_ && record.diagnostics) {
      const StepDiagnostics& d = *record.diagnostics;
      observe_slack(kDistance, t, d.dist_bound - d.dist_yx);
      observe_slack(kContraction, t, d.contraction_bound - d.dist_yx);
      observe_slack(kDeltaEps, t, d.eps - d.delta);
      observe_slack(kEpsBound, t, d.eps_bound - d.eps);
      observe_slack(kOptY, t, d.opt_residual_y);
      observe_slack(kOptX, t, d.opt_residual_x);
      eps_sum_ += d.eps;
      if (eps_sum_applicable_) observe_slack(kEpsSum, t, eps_sum_budget_ - eps_sum_);
    }
    return all_passed(checks_);
  }

  const std::vector<InvariantCheck>& checks() const { return checks_; }

private:
  static constexpr std::size_t kFeasibility = 0, kAverage = 1, kDistance = 2,
                               kContraction = 3, kDeltaEps = 4, kEpsBound = 5, kOptY = 6,
                               kOptX = 7, kEpsSum = 8, kFirstDiagnostic = 2;

  void observe_slack(std::size_t which, std::size_t t, double slack) {
    InvariantCheck& check = checks_[which];
    if (check.status == CheckStatus::NotApplicable) return;
    if (std::isnan(slack)) slack = -kInf;
    if (slack < check.worst_slack) {
      check.worst_slack = slack;
      check.worst_t = t;
    }
    if (slack < -tolerances_[which]) check.status = CheckStatus::Fail;
  }

  const BlockLayout& layout_;
  bool has_diagnostics_;
  bool eps_sum_applicable_;
  double eps_sum_budget_ = 0.0;
  double eps_sum_ = 0.0;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> y_sum_;
  std::vector<InvariantCheck> checks_;
  std::vector<double> tolerances_;
};

Vector prox_step(const MirrorMap& map, const BlockLayout& layout, const Vector& x,
                 const DualPoint& g, double gamma) {
  return map.kind == MirrorKind::Entropic ? entropic_update(x, g, gamma, layout)
                                          : euclidean_update(x, g, gamma, layout);
}

}  // namespace

const char* to_string(Method method) {
  return method == Method::Popov ? "popov" : "korpelevich";
}

double auto_step_size(Method method, const MirrorMap& mirror, double lipschitz) {
  if (!(lipschitz > 0.0)) throw ContractViolation("auto_step_size: L must be positive");
  return method == Method::Popov ? mirror.alpha / (2.0 * lipschitz)
                                 : mirror.alpha / (std::sqrt(2.0) * lipschitz);
}

double resolve_step_size(const SolverConfig& config, const VIProblem& problem) {
  if (!config.gamma) return auto_step_size(config.method, config.mirror, problem.lipschitz());
  const double gamma = *config.gamma;
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ContractViolation("step size must be a positive finite number");
  }
  return gamma;
}

StepResult popov_step(const SolverState& state, MappingOracle& oracle, const MirrorMap& map,
                      double gamma) {
  const BlockLayout& layout = oracle.problem().layout();
  StepResult step;
  step.xi = state.mapped_y;
  step.y_next = prox_step(map, layout, state.x, step.xi, gamma);
  step.eta = oracle(step.y_next);
  step.x_next = prox_step(map, layout, state.x, step.eta, gamma);
  return step;
}

StepResult korpelevich_step(const SolverState& state, MappingOracle& oracle,
                            const MirrorMap& map, double gamma) {
  const BlockLayout& layout = oracle.problem().layout();
  StepResult step;
  step.xi = oracle(state.x);
  step.y_next = prox_step(map, layout, state.x, step.xi, gamma);
  step.eta = oracle(step.y_next);
  step.x_next = prox_step(map, layout, state.x, step.eta, gamma);
  return step;
}

StepDiagnostics compute_step_diagnostics(std::size_t t, const Vector& x_t,
                                         const Vector& xi_point, const StepResult& step,
                                         const VIProblem& problem, const MirrorMap& map,
                                         double gamma) {
  const Vector& y1 = step.y_next;
  const Vector& x1 = step.x_next;
  const double alpha = map.alpha;

  const double psi_x = psi(map, x_t);
  const double psi_x1 = psi(map, x1);
  const DualPoint grad_x = grad_psi(map, x_t);
  const DualPoint grad_y1 = grad_psi(map, y1);
  const double dual_diff = (step.xi - step.eta).norm();

  StepDiagnostics d;
  d.t = t;
  d.delta = gamma * step.eta.dot(y1 - x1) + (psi_x + grad_x.dot(x1 - x_t) - psi_x1);
  d.eps = gamma * (step.eta - step.xi).dot(y1 - x1) +
          (psi_x + grad_x.dot(y1 - x_t) + grad_y1.dot(x1 - y1) - psi_x1);
  d.dist_yx = (y1 - x1).norm();
  d.dist_yxprev = (y1 - x_t).norm();
  d.eps_bound = gamma * gamma / alpha * dual_diff * dual_diff -
                0.5 * alpha * (d.dist_yxprev * d.dist_yxprev + d.dist_yx * d.dist_yx);
  d.dist_bound = gamma / alpha * dual_diff;
  d.contraction_bound = gamma * problem.lipschitz() / alpha * (xi_point - y1).norm();

  const BlockLayout& layout = problem.layout();
  d.opt_residual_y = optimality_residual(gamma * step.xi - grad_x + grad_y1, y1, layout);
  d.opt_residual_x =
      optimality_residual(gamma * step.eta - grad_x + grad_psi(map, x1), x1, layout);
  return d;
}

std::vector<InvariantCheck> check_invariants(const Trace& trace, const VIProblem& problem) {
  InvariantTracker tracker(trace, problem);
  for (std::size_t t = 0; t < trace.records.size(); ++t) tracker.observe(t, trace.records[t]);
  return tracker.checks();
}

bool all_passed(const std::vector<InvariantCheck>& checks) {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Fail) return false;
  }
  return true;
}

std::string format_report(const std::vector<InvariantCheck>& checks) {
  std::ostringstream out;
  out.precision(6);
  for (const auto& c : checks) {
    const char* status = c.status == CheckStatus::Pass   ? "PASS"
                         : c.status == CheckStatus::Fail ? "FAIL"
                                                         : "N/A ";
    out << status << "  " << c.name;
    if (c.status != CheckStatus::NotApplicable) {
      out << "  worst_slack=" << std::scientific << c.worst_slack << std::defaultfloat
          << " at t=" << c.worst_t;
    }
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
  }
  return out.str();
}

Trace run(const SolverConfig& config, const VIProblem& problem) {
  const FeasibleSet& set = problem.set();
  Trace trace;
  trace.config = config;
  if (trace.config.x0.size() == 0) trace.config.x0 = set.uniform_point();
  if (trace.config.y0.size() == 0) trace.config.y0 = set.uniform_point();
  if (!set.contains(trace.config.x0) || !set.contains(trace.config.y0)) {
    throw ContractViolation("run: x0 and y0 must lie in the feasible set");
  }
  trace.gamma = resolve_step_size(config, problem);
  trace.lipschitz = problem.lipschitz();
  const MirrorMap& map = config.mirror;
  const double gamma = trace.gamma;

  MappingOracle oracle(problem);
  SolverState state{trace.config.x0, trace.config.y0, {}};
  if (config.method == Method::Popov) state.mapped_y = oracle(state.y);  // warmup

  trace.records.reserve(config.max_iters + 1);
  trace.records.push_back({state.x, state.y, state.y, std::nullopt, oracle.calls(), 0.0});

  InvariantTracker tracker(trace, problem);
  const bool strict = config.diagnostics == DiagnosticsMode::Strict;
  if (strict) tracker.observe(0, trace.records.front());

  // Compensated running sum of the y iterates.
  Vector sum = Vector::Zero(state.y.size());
  Vector compensation = Vector::Zero(state.y.size());

  for (std::size_t t = 0; t < config.max_iters; ++t) {
    const auto start = std::chrono::steady_clock::now();
    StepResult step = config.method == Method::Popov
                          ? popov_step(state, oracle, map, gamma)
                          : korpelevich_step(state, oracle, map, gamma);

    for (Eigen::Index i = 0; i < sum.size(); ++i) {
      const double v = step.y_next[i];
      const double next = sum[i] + v;
      compensation[i] += std::abs(sum[i]) >= std::abs(v) ? (sum[i] - next) + v
                                                         : (v - next) + sum[i];
      sum[i] = next;
    }
    IterateRecord record;
    record.average = (sum + compensation) / static_cast<double>(t + 1);
    if (config.diagnostics != DiagnosticsMode::Off) {
      const Vector& xi_point = config.method == Method::Popov ? state.y : state.x;
      record.diagnostics =
          compute_step_diagnostics(t, state.x, xi_point, step, problem, map, gamma);
    }
    record.map_evals = oracle.calls();
    record.x = step.x_next;
    record.y = step.y_next;
    state = SolverState{std::move(step.x_next), std::move(step.y_next), std::move(step.eta)};
    record.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    trace.records.push_back(std::move(record));

    if (strict && !tracker.observe(t + 1, trace.records.back())) {
      trace.map_evals = oracle.calls();
      throw DiagnosticViolation(tracker.checks(),
                                "invariant violated at step " + std::to_string(t) + "\n" +
                                    format_report(tracker.checks()));
    }
  }
  trace.map_evals = oracle.calls();
  return trace;
}

}  // namespace mirrorprox
