#pragma once

// Solver run with periodic dual-gap certification of the averaged iterate,
// producing the rows of trace.csv.

#include <cstdint>
#include <string>

#include "mirrorprox/gap.hpp"
#include "mirrorprox/report.hpp"
#include "mirrorprox/solvers.hpp"

namespace mirrorprox {

struct ExperimentOptions {
  SolverConfig solver;
  std::size_t gap_every = 10;
  std::size_t gap_samples = kDefaultGapSamples;
  std::uint64_t seed = 0;
  double grid_step = kDefaultGridStep;
  unsigned workers = 1;
  bool record_time = false;  // wall_ms stays 0 otherwise, keeping traces byte-stable
  std::string problem_name;
};

struct ExperimentResult {
  Trace trace;
  TraceTable table;
};

// Sampling estimates at every `gap_every`-th iteration and at the last one;
// on 2x2 games the last iteration also gets a grid-oracle row. The bound
// column holds the Popov rate bound when 0 < gamma <= alpha/(2L).
ExperimentResult run_experiment(const ExperimentOptions& options, const VIProblem& problem);

}  // namespace mirrorprox
