// mirrorprox: generate games, run solvers, certify gaps, verify the step
// invariants, and plot convergence traces.
//
// Exit codes: 0 success, 2 argument or parse error, 3 invariant violation,
// 4 I/O error.
#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mirrorprox/errors.hpp"
#include "mirrorprox/experiment.hpp"
#include "mirrorprox/gap.hpp"
#include "mirrorprox/problems.hpp"
#include "mirrorprox/report.hpp"
#include "mirrorprox/solvers.hpp"

namespace fs = std::filesystem;
using namespace mirrorprox;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string problem;
  std::optional<std::uint64_t> seed;
  std::vector<double> eig{0.0, 100.0};
  std::string method = "popov";
  std::string mirror = "entropic";
  std::string gamma = "auto";
  std::size_t iters = 1000;
  std::size_t gap_every = 10;
  std::size_t gap_samples = kDefaultGapSamples;
  double grid_step = kDefaultGridStep;
  bool strict = false;
  std::string x0;
  std::string y0;
  unsigned threads = 1;
  bool timing = false;
  std::string out;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MIRRORPROX_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc() || ptr != end) {
      throw UsageError(std::string("MIRRORPROX_SEED is not an unsigned integer: ") + env);
    }
    return value;
  }
  return 0;
}

Vector parse_point(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError(std::string(flag) + ": not a number: '" + item + "'");
    }
    values.push_back(v);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct LoadedProblem {
  ProblemSpec spec;
  std::string name;
};

LoadedProblem load_problem(const RunFlags& flags) {
  if (flags.problem == "matching-pennies") return {matching_pennies(), flags.problem};
  if (flags.problem == "zero") return {zero_game(), flags.problem};
  if (flags.problem.empty()) {
    const std::uint64_t seed = resolve_seed(flags.seed);
    if (flags.eig[0] > flags.eig[1]) throw UsageError("--eig: lo must not exceed hi");
    return {generate_game(seed, flags.eig[0], flags.eig[1]), "generated:" + std::to_string(seed)};
  }
  return {load_spec(flags.problem), fs::path(flags.problem).filename().string()};
}

SolverConfig solver_config(const RunFlags& flags) {
  SolverConfig config;
  config.method = flags.method == "korpelevich" ? Method::Korpelevich : Method::Popov;
  config.mirror = flags.mirror == "euclidean" ? MirrorMap::euclidean() : MirrorMap::entropic();
  if (flags.gamma != "auto") {
    double g = 0.0;
    const auto& s = flags.gamma;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), g);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError("--gamma: expected 'auto' or a number, got '" + s + "'");
    }
    config.gamma = g;
  }
  config.max_iters = flags.iters;
  if (!flags.x0.empty()) config.x0 = parse_point(flags.x0, "--x0");
  if (!flags.y0.empty()) config.y0 = parse_point(flags.y0, "--y0");
  return config;
}

void add_problem_flags(CLI::App& cmd, RunFlags& flags) {
  cmd.add_option("problem", flags.problem,
                 "Problem file (.vigame), 'matching-pennies' or 'zero'; "
                 "omitted: generate from --seed/--eig");
  cmd.add_option("--seed", flags.seed, "RNG seed (fallback: MIRRORPROX_SEED, then 0)");
  cmd.add_option("--eig", flags.eig, "Spectrum range of generated games")->expected(2);
}

void add_solver_flags(CLI::App& cmd, RunFlags& flags) {
  cmd.add_option("--method", flags.method)->check(CLI::IsMember({"popov", "korpelevich"}));
  cmd.add_option("--mirror", flags.mirror)->check(CLI::IsMember({"entropic", "euclidean"}));
  cmd.add_option("--gamma", flags.gamma, "Step size or 'auto'");
  cmd.add_option("--iters", flags.iters, "Iterations T")->check(CLI::PositiveNumber);
  cmd.add_option("--x0", flags.x0, "Comma-separated initial x0");
  cmd.add_option("--y0", flags.y0, "Comma-separated initial y0");
}

void add_gap_flags(CLI::App& cmd, RunFlags& flags) {
  cmd.add_option("--gap-samples", flags.gap_samples, "Samples per gap estimate")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--gap-grid-step", flags.grid_step, "Grid oracle step")
      ->check(CLI::Range(1e-6, 1.0));
  cmd.add_option("--threads", flags.threads, "Gap sampling workers")->check(CLI::PositiveNumber);
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out.flush()) throw IoError("cannot write " + path.string());
}

int cmd_generate(const RunFlags& flags) {
  if (flags.eig[0] > flags.eig[1]) throw UsageError("--eig: lo must not exceed hi");
  const std::uint64_t seed = resolve_seed(flags.seed);
  const ProblemSpec spec = generate_game(seed, flags.eig[0], flags.eig[1]);
  save_spec(flags.out, spec);
  const Eigen::Matrix4d j = jacobian(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig((j + j.transpose()) / 2.0,
                                                     Eigen::EigenvaluesOnly);
  std::cout << "wrote " << flags.out << "\n"
            << "seed " << seed << "\n"
            << "L_computed " << format_real(spec.l_computed) << "\n"
            << "sym_eigenvalues";
  for (int i = 0; i < 4; ++i) std::cout << ' ' << format_real(eig.eigenvalues()[i]);
  std::cout << "\n";
  return kExitOk;
}

int cmd_solve(const RunFlags& flags) {
  const LoadedProblem loaded = load_problem(flags);
  const VIProblem problem = to_problem(loaded.spec);
  ExperimentOptions options;
  options.solver = solver_config(flags);
  options.solver.diagnostics = flags.strict ? DiagnosticsMode::Strict : DiagnosticsMode::Off;
  options.gap_every = flags.gap_every;
  options.gap_samples = flags.gap_samples;
  options.seed = resolve_seed(flags.seed);
  options.grid_step = flags.grid_step;
  options.workers = flags.threads;
  options.record_time = flags.timing;
  options.problem_name = loaded.name;

  const ExperimentResult result = run_experiment(options, problem);
  const fs::path dir = flags.out.empty() ? fs::path(".") : fs::path(flags.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream csv;
  write_trace_csv(csv, result.table);
  write_file(dir / "trace.csv", csv.str());

  const Trace& trace = result.trace;
  std::cout << "wrote " << (dir / "trace.csv").string() << "\n"
            << "gamma " << format_real(trace.gamma) << "  L " << format_real(trace.lipschitz)
            << "  map_evals " << trace.map_evals << "\n";
  if (!result.table.rows.empty()) {
    const TraceRow& last = result.table.rows.back();
    std::cout << "final gap (" << last.gap_method << ") " << format_real(last.gap_estimate)
              << "  bound " << format_real(last.bound) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const RunFlags& flags) {
  const LoadedProblem loaded = load_problem(flags);
  const VIProblem problem = to_problem(loaded.spec);
  SolverConfig config = solver_config(flags);
  config.diagnostics = DiagnosticsMode::Record;
  const Trace trace = run(config, problem);
  const auto checks = check_invariants(trace, problem);
  std::cout << format_report(checks);
  return all_passed(checks) ? kExitOk : kExitInvariant;
}

int cmd_gap(const RunFlags& flags, const std::string& point) {
  const LoadedProblem loaded = load_problem(flags);
  const VIProblem problem = to_problem(loaded.spec);
  const Vector x = point.empty() ? problem.set().uniform_point() : parse_point(point, "--x");
  if (x.size() != static_cast<Eigen::Index>(problem.dim()) || !problem.set().contains(x)) {
    throw UsageError("--x: point is not in the feasible set");
  }
  const std::uint64_t seed = resolve_seed(flags.seed);
  const GapEstimate sampled =
      estimate_gap_sampling(problem, x, flags.gap_samples, seed, flags.threads);
  std::cout << "sampling " << format_real(sampled.value) << "  samples " << sampled.samples
            << "  seed " << seed << "\n";
  const GapEstimate grid = gap_grid_oracle(problem, x, GridOptions{flags.grid_step, true});
  std::cout << "grid " << format_real(grid.value) << "  step " << format_real(grid.grid_step)
            << "\n";
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out) {
  if (inputs.empty()) throw UsageError("plot: at least one trace file is required");
  std::vector<TraceTable> tables;
  for (const auto& name : inputs) {
    std::ifstream in(name, std::ios::binary);
    if (!in) throw IoError("cannot read " + name);
    TraceTable table = read_trace_csv(in, name);
    table.meta.try_emplace("source", name);
    tables.push_back(std::move(table));
  }
  const fs::path svg = out.empty() ? fs::path("gap.svg") : fs::path(out);
  fs::path merged = svg;
  merged.replace_extension(".csv");
  write_file(svg, render_svg(tables));
  std::ostringstream csv;
  write_merged_csv(csv, tables);
  write_file(merged, csv.str());
  std::cout << "wrote " << svg.string() << "\n" << "wrote " << merged.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Popov and Korpelevich mirror-prox for monotone variational inequalities"};
  app.require_subcommand(1);

  RunFlags gen_flags, solve_flags, verify_flags, gap_flags;
  std::string gap_point;
  std::vector<std::string> plot_inputs;
  std::string plot_out;

  auto* generate = app.add_subcommand("generate", "Generate a random monotone 2x2 game");
  generate->add_option("--seed", gen_flags.seed, "RNG seed (fallback: MIRRORPROX_SEED, then 0)");
  generate->add_option("--eig", gen_flags.eig, "Spectrum range of the symmetric part")
      ->expected(2);
  generate->add_option("-o,--out", gen_flags.out, "Output .vigame path")->required();

  auto* solve = app.add_subcommand("solve", "Run a solver and write trace.csv");
  add_problem_flags(*solve, solve_flags);
  add_solver_flags(*solve, solve_flags);
  add_gap_flags(*solve, solve_flags);
  solve->add_option("--gap-every", solve_flags.gap_every, "Gap cadence")
      ->check(CLI::PositiveNumber);
  solve->add_flag("--strict", solve_flags.strict, "Abort at the first violated step invariant");
  solve->add_flag("--timing", solve_flags.timing, "Record wall-clock time in wall_ms");
  solve->add_option("-o,--out", solve_flags.out, "Output directory");

  auto* verify = app.add_subcommand("verify", "Check the per-step invariants of a run");
  add_problem_flags(*verify, verify_flags);
  add_solver_flags(*verify, verify_flags);

  auto* gap = app.add_subcommand("gap", "Estimate the dual gap at a point");
  add_problem_flags(*gap, gap_flags);
  add_gap_flags(*gap, gap_flags);
  gap->add_option("--x", gap_point, "Comma-separated point (default: uniform)");

  auto* plot = app.add_subcommand("plot", "Plot trace files to SVG and merged CSV");
  plot->add_option("traces", plot_inputs, "trace.csv files");
  plot->add_option("-o,--out", plot_out, "Output .svg path (merged CSV next to it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(gen_flags);
    if (*solve) return cmd_solve(solve_flags);
    if (*verify) return cmd_verify(verify_flags);
    if (*gap) return cmd_gap(gap_flags, gap_point);
    if (*plot) return cmd_plot(plot_inputs, plot_out);
  } catch (const DiagnosticViolation& e) {
    std::cerr << "error: " << e.what() << "\n" << format_report(e.checks());
    return kExitInvariant;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalDegeneracy& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
