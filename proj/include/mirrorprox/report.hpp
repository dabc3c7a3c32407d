#pragma once

// Trace CSV files and SVG convergence plots.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mirrorprox {

// One row of trace.csv. `bound` is NaN when the rate bound does not apply.
struct TraceRow {
  std::size_t iter = 0;
  double gap_estimate = 0.0;
  std::string gap_method;
  double bound = 0.0;
  std::size_t map_evals = 0;
  double wall_ms = 0.0;
};

// Metadata is written as leading "# key=value" lines before the header row.
struct TraceTable {
  std::map<std::string, std::string> meta;
  std::vector<TraceRow> rows;

  std::string label() const;
};

inline constexpr const char* kTraceHeader = "iter,gap_estimate,gap_method,bound,map_evals,wall_ms";

// 17 significant digits; NaN is written as "nan".
std::string format_real(double value);

void write_trace_csv(std::ostream& out, const TraceTable& table);
// Throws ParseError whose message carries `source` and the 1-based line number.
TraceTable read_trace_csv(std::istream& in, const std::string& source);

// Long-format table of every trace: trace,label,iter,gap_estimate,gap_method,bound.
void write_merged_csv(std::ostream& out, const std::vector<TraceTable>& tables);

// Log-scale gap against iteration, one curve per trace plus dashed rate-bound
// curves for traces that carry one.
std::string render_svg(const std::vector<TraceTable>& tables);

}  // namespace mirrorprox
