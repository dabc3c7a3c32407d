#pragma once

// Popov and Korpelevich mirror-prox iterations with uniform iterate averaging
// and optional per-step analysis diagnostics.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorprox/core.hpp"

namespace mirrorprox {

enum class Method { Popov, Korpelevich };
enum class DiagnosticsMode { Off, Record, Strict };

const char* to_string(Method method);

// Counts every evaluation of F it performs.
class MappingOracle {
public:
  explicit MappingOracle(const VIProblem& problem) : problem_(&problem) {}

  DualPoint operator()(const Vector& x) {
    ++calls_;
    return eval_mapping(*problem_, x);
  }
  std::size_t calls() const noexcept { return calls_; }
  const VIProblem& problem() const noexcept { return *problem_; }

private:
  const VIProblem* problem_;
  std::size_t calls_ = 0;
};

struct SolverConfig {
  Method method = Method::Popov;
  MirrorMap mirror = MirrorMap::entropic();
  std::optional<double> gamma;  // empty: alpha/(2L) for Popov, alpha/(sqrt(2) L) for Korpelevich
  std::size_t max_iters = 1000;
  Vector x0;  // empty: uniform point of the set
  Vector y0;  // empty: uniform point of the set
  DiagnosticsMode diagnostics = DiagnosticsMode::Off;
};

double auto_step_size(Method method, const MirrorMap& mirror, double lipschitz);
double resolve_step_size(const SolverConfig& config, const VIProblem& problem);

// Iterates (x_t, y_t) plus the cached F(y_t) that the Popov update reuses.
struct SolverState {
  Vector x;
  Vector y;
  DualPoint mapped_y;
};

// One two-step update x -> (y_next, x_next) with the dual points it used:
// y_next = P_x(gamma * xi), x_next = P_x(gamma * eta), eta = F(y_next).
struct StepResult {
  Vector y_next;
  Vector x_next;
  DualPoint xi;
  DualPoint eta;
};

// xi = F(y_t) from the cache; exactly one fresh evaluation, F(y_next).
StepResult popov_step(const SolverState& state, MappingOracle& oracle,
                      const MirrorMap& map, double gamma);
// xi = F(x_t); two fresh evaluations.
StepResult korpelevich_step(const SolverState& state, MappingOracle& oracle,
                            const MirrorMap& map, double gamma);

struct StepDiagnostics {
  std::size_t t = 0;
  double delta = 0.0;
  double eps = 0.0;
  double eps_bound = 0.0;       // gamma^2/alpha |xi-eta|^2 - alpha/2 (|y'-x|^2 + |y'-x'|^2)
  double dist_yx = 0.0;         // |y_{t+1} - x_{t+1}|
  double dist_yxprev = 0.0;     // |y_{t+1} - x_t|
  double dist_bound = 0.0;      // gamma/alpha |xi - eta|
  double contraction_bound = 0.0;  // gamma L/alpha |xi_point - y_{t+1}|
  double opt_residual_y = 0.0;  // min_z <gamma xi - grad psi(x_t) + grad psi(y_{t+1}), z - y_{t+1}>
  double opt_residual_x = 0.0;  // same with eta and x_{t+1}
};

// `xi_point` is where xi was evaluated: y_t for Popov, x_t for Korpelevich.
// Residual test points are the vertices of every block plus the iterate.
StepDiagnostics compute_step_diagnostics(std::size_t t, const Vector& x_t,
                                         const Vector& xi_point, const StepResult& step,
                                         const VIProblem& problem, const MirrorMap& map,
                                         double gamma);

struct IterateRecord {
  Vector x;
  Vector y;
  Vector average;  // y^{(t)}; y_0 for the initial record
  std::optional<StepDiagnostics> diagnostics;
  std::size_t map_evals = 0;  // cumulative fresh evaluations of F
  double wall_ms = 0.0;
};

struct Trace {
  SolverConfig config;  // with x0/y0 resolved
  double gamma = 0.0;
  double lipschitz = 0.0;
  std::vector<IterateRecord> records;  // records[t] for t = 0..max_iters
  std::size_t map_evals = 0;

  std::size_t iterations() const noexcept { return records.empty() ? 0 : records.size() - 1; }
  const Vector& average(std::size_t t) const { return records.at(t).average; }
};

// Tolerances of the invariant suite.
inline constexpr double kDeltaEpsTolerance = 1e-9;
inline constexpr double kDistanceTolerance = 1e-8;
inline constexpr double kEpsBoundTolerance = 1e-8;
inline constexpr double kResidualTolerance = 1e-6;
inline constexpr double kEpsSumTolerance = 1e-6;
inline constexpr double kAverageTolerance = 1e-12;

enum class CheckStatus { Pass, Fail, NotApplicable };

struct InvariantCheck {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  double worst_slack = 0.0;  // min over steps of (rhs - lhs); pass iff >= -tolerance
  std::size_t worst_t = 0;
  std::string note;
};

// Evaluates the full invariant suite on a trace recorded with diagnostics.
// The eps-sum check is N/A unless the method is Popov with
// 0 < gamma <= alpha/(2L).
std::vector<InvariantCheck> check_invariants(const Trace& trace, const VIProblem& problem);

bool all_passed(const std::vector<InvariantCheck>& checks);

std::string format_report(const std::vector<InvariantCheck>& checks);

class DiagnosticViolation : public std::runtime_error {
public:
  DiagnosticViolation(std::vector<InvariantCheck> checks, const std::string& what)
      : std::runtime_error(what), checks_(std::move(checks)) {}
  const std::vector<InvariantCheck>& checks() const noexcept { return checks_; }

private:
  std::vector<InvariantCheck> checks_;
};

// Runs `max_iters` steps. In Strict mode the run stops at the first violated
// invariant and throws DiagnosticViolation carrying the report.
Trace run(const SolverConfig& config, const VIProblem& problem);

}  // namespace mirrorprox
