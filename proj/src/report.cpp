#include "mirrorprox/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mirrorprox/errors.hpp"

namespace mirrorprox {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw ParseError("", source + ":" + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& s, const std::string& source, std::size_t line,
                  const char* column) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail(source, line, std::string("bad number '") + s + "' in column " + column);
  }
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& source, std::size_t line,
                        const char* column) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail(source, line, std::string("bad integer '") + s + "' in column " + column);
  }
  return v;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string TraceTable::label() const {
  if (auto it = meta.find("label"); it != meta.end()) return it->second;
  const auto method = meta.find("method");
  const auto mirror = meta.find("mirror");
  if (method != meta.end() && mirror != meta.end()) return method->second + "/" + mirror->second;
  return "trace";
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const TraceTable& table) {
  for (const auto& [key, value] : table.meta) out << "# " << key << '=' << value << '\n';
  out << kTraceHeader << '\n';
  for (const TraceRow& row : table.rows) {
    out << row.iter << ',' << format_real(row.gap_estimate) << ',' << row.gap_method << ','
        << format_real(row.bound) << ',' << row.map_evals << ',' << format_real(row.wall_ms)
        << '\n';
  }
}

TraceTable read_trace_csv(std::istream& in, const std::string& source) {
  TraceTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("#", 0) == 0) {
        const std::string body = line.substr(line.find_first_not_of("# ") == std::string::npos
                                                 ? line.size()
                                                 : line.find_first_not_of("# "));
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(source, line_no, "metadata line without '='");
        table.meta[body.substr(0, eq)] = body.substr(eq + 1);
        continue;
      }
      if (line != kTraceHeader) fail(source, line_no, "expected header '" + std::string(kTraceHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 6) {
      fail(source, line_no, "expected 6 columns, found " + std::to_string(fields.size()));
    }
    TraceRow row;
    row.iter = parse_count(fields[0], source, line_no, "iter");
    row.gap_estimate = parse_real(fields[1], source, line_no, "gap_estimate");
    row.gap_method = fields[2];
    if (row.gap_method.empty()) fail(source, line_no, "empty gap_method");
    row.bound = parse_real(fields[3], source, line_no, "bound");
    row.map_evals = parse_count(fields[4], source, line_no, "map_evals");
    row.wall_ms = parse_real(fields[5], source, line_no, "wall_ms");
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) fail(source, line_no, "missing header row");
  return table;
}

void write_merged_csv(std::ostream& out, const std::vector<TraceTable>& tables) {
  out << "trace,label,iter,gap_estimate,gap_method,bound\n";
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (const TraceRow& row : tables[i].rows) {
      out << i << ',' << tables[i].label() << ',' << row.iter << ','
          << format_real(row.gap_estimate) << ',' << row.gap_method << ','
          << format_real(row.bound) << '\n';
    }
  }
}

std::string render_svg(const std::vector<TraceTable>& tables) {
  constexpr double kWidth = 800, kHeight = 520;
  constexpr double kLeft = 80, kRight = 220, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  // Sampling rows form the curves; the final grid rows are drawn as markers.
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& t : tables) {
    for (const auto& r : t.rows) {
      x_min = std::min(x_min, static_cast<double>(r.iter));
      x_max = std::max(x_max, static_cast<double>(r.iter));
      for (double v : {r.gap_estimate, r.bound}) {
        if (v > 0.0 && std::isfinite(v)) {
          y_min = std::min(y_min, v);
          y_max = std::max(y_max, v);
        }
      }
    }
  }
  if (!std::isfinite(x_min)) x_min = 0, x_max = 1;
  if (x_max <= x_min) x_max = x_min + 1;
  if (!std::isfinite(y_min)) y_min = 1e-6, y_max = 1;
  const double decade_lo = std::floor(std::log10(y_min));
  double decade_hi = std::ceil(std::log10(y_max));
  if (decade_hi <= decade_lo) decade_hi = decade_lo + 1;

  auto px = [&](double iter) { return kLeft + (iter - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double v) {
    return kTop + (decade_hi - std::log10(v)) / (decade_hi - decade_lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  for (double d = decade_lo; d <= decade_hi; d += 1.0) {
    const double y = py(std::pow(10.0, d));
    svg << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y) << "\" x2=\""
        << fixed(kLeft + plot_w) << "\" y2=\"" << fixed(y) << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double iter = x_min + (x_max - x_min) * i / 5.0;
    const double x = px(iter);
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\""
        << fixed(x) << "\" y2=\"" << fixed(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(kTop + plot_h + 20)
        << "\" text-anchor=\"middle\">" << static_cast<long long>(std::llround(iter)) << "</text>\n";
  }
  svg << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(plot_w)
      << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 15)
      << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"18\" y=\"" << fixed(kTop + plot_h / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << fixed(kTop + plot_h / 2) << ")\">dual gap estimate</text>\n";

  double legend_y = kTop + 10;
  auto legend = [&](const std::string& color, const std::string& label, bool dashed) {
    const double x = kLeft + plot_w + 15;
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(legend_y) << "\" x2=\"" << fixed(x + 25)
        << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
        << "<text x=\"" << fixed(x + 32) << "\" y=\"" << fixed(legend_y + 4) << "\">"
        << escape_xml(label) << "</text>\n";
    legend_y += 20;
  };

  for (std::size_t i = 0; i < tables.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    std::ostringstream curve, bound;
    bool has_bound = false;
    for (const auto& r : tables[i].rows) {
      if (r.gap_method != "sampling") continue;
      if (r.gap_estimate > 0.0) curve << fixed(px(r.iter)) << ',' << fixed(py(r.gap_estimate)) << ' ';
      if (r.bound > 0.0 && std::isfinite(r.bound)) {
        bound << fixed(px(r.iter)) << ',' << fixed(py(r.bound)) << ' ';
        has_bound = true;
      }
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << curve.str() << "\"/>\n";
    for (const auto& r : tables[i].rows) {
      if (r.gap_method == "grid" && r.gap_estimate > 0.0) {
        svg << "<circle cx=\"" << fixed(px(r.iter)) << "\" cy=\"" << fixed(py(r.gap_estimate))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    legend(color, tables[i].label(), false);
    if (has_bound) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1\" stroke-dasharray=\"6,4\" points=\"" << bound.str() << "\"/>\n";
      legend(color, "rate bound (" + tables[i].label() + ")", true);
    }
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace mirrorprox
