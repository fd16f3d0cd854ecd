#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "recmle/analytic.hpp"
#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/estimators.hpp"
#include "recmle/family.hpp"
#include "recmle/montecarlo.hpp"
#include "recmle/records.hpp"

namespace recmle {

using nlohmann::json;

/// Ordered key/value run description. The canonical text form (keys sorted,
/// one `key=value` per line) both round-trips losslessly and feeds the run
/// digest, so identical configurations always hash identically.
class RunConfig {
 public:
  void set(const std::string& key, const std::string& value) {
    if (key.empty() ||
        key.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                              "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
            std::string::npos) {
      throw argument_error("RunConfig: invalid key '" + key + "'");
    }
    if (value.find('\n') != std::string::npos) {
      throw argument_error("RunConfig: value for '" + key +
                           "' contains a newline");
    }
    for (auto& kv : kv_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    kv_.emplace_back(key, value);
  }

  void set(const std::string& key, double value) {
    set(key, detail::fmt_g17(value));
  }
  void set(const std::string& key, std::size_t value) {
    set(key, std::to_string(value));
  }
  void set_u64(const std::string& key, std::uint64_t value) {
    set(key, std::to_string(value));
  }

  const std::string* find(const std::string& key) const {
    for (const auto& kv : kv_) {
      if (kv.first == key) return &kv.second;
    }
    return nullptr;
  }

  std::string canonical() const {
    auto sorted = kv_;
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (const auto& [k, v] : sorted) {
      out += k;
      out += '=';
      out += v;
      out += '\n';
    }
    return out;
  }

  static RunConfig parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw io_error("RunConfig: line without '=': " + line);
      }
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
  }

  std::string digest() const {
    return detail::hex64(detail::fnv1a64(canonical()));
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : kv_) j[k] = v;
    return j;
  }

  bool operator==(const RunConfig& other) const {
    return canonical() == other.canonical();
  }

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
};

/// Standard envelope for every JSON artifact the tools emit.
inline json report_envelope(const RunConfig& cfg, json results,
                            std::vector<std::string> warnings) {
  json j;
  j["config"] = cfg.to_json();
  j["results"] = std::move(results);
  j["warnings"] = std::move(warnings);
  j["digest"] = cfg.digest();
  return j;
}

inline json to_json(const EstimateResult& est) {
  json j;
  j["member"] = est.member_name;
  j["source"] = est.source;
  j["size"] = est.size;
  j["stat"] = est.stat;
  j["theta_hat"] = est.theta_hat;
  j["transform"] = to_string(est.transform);
  j["value"] = est.value;
  return j;
}

inline json to_json(const SeriesEvaluation& ev) {
  json j;
  j["value"] = ev.value;
  j["truncation_index"] = ev.truncation_index;
  j["last_term_magnitude"] = ev.last_term_magnitude;
  j["formal_only"] = ev.formal_only;
  j["warnings"] = ev.warnings;
  return j;
}

inline json to_json(const McReport& rep) {
  json j;
  j["member"] = rep.member_name;
  j["source"] = to_string(rep.source);
  j["transform"] = to_string(rep.transform);
  j["size"] = rep.size;
  j["reps"] = rep.reps;
  j["seed"] = rep.seed;
  j["target"] = rep.target;
  j["mean"] = rep.mean;
  j["bias"] = rep.bias;
  j["mse"] = rep.mse;
  j["se_mean"] = rep.se_mean;
  j["se_mse"] = rep.se_mse;
  j["median_error"] = rep.median_error;
  j["mad_error"] = rep.mad_error;
  j["failures"] = rep.failures;
  j["warnings"] = rep.warnings;
  return j;
}

inline json to_json(const KsResult& ks) {
  json j;
  j["statistic"] = ks.statistic;
  j["p_value"] = ks.p_value;
  j["n_effective"] = ks.n_effective;
  return j;
}

inline json to_json(const ValidationReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["detail"] = c.detail;
    checks.push_back(std::move(jc));
  }
  json j;
  j["checks"] = std::move(checks);
  j["all_passed"] = rep.all_passed();
  return j;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double_cell(const std::string& cell, std::size_t row,
                                const char* file) {
  const std::string t = trim(cell);
  if (t.empty()) {
    throw io_error(std::string(file) + ": empty cell at row " +
                   std::to_string(row));
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw io_error(std::string(file) + ": non-numeric cell '" + t +
                   "' at row " + std::to_string(row));
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace detail

/// Read one named column out of a CSV with arbitrary columns. Rows are
/// numbered from 1 at the first data row, which is how parse errors are
/// reported.
inline std::vector<double> read_csv_column(const std::string& path,
                                           const std::string& column) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const auto header = detail::split_csv_line(line);
  std::size_t col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (detail::trim(header[j]) == column) {
      col = j;
      break;
    }
  }
  if (col == header.size()) {
    throw io_error(path + ": no column named '" + column + "'");
  }
  std::vector<double> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw io_error(path + ": expected " + std::to_string(header.size()) +
                     " columns at row " + std::to_string(row));
    }
    out.push_back(detail::parse_double_cell(cells[col], row, path.c_str()));
  }
  if (out.empty()) throw io_error(path + ": no data rows");
  return out;
}

/// Read a one-column `value` CSV into a series. Rows are numbered from 1 at
/// the first data row, which is how parse errors are reported.
inline std::vector<double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const auto header = detail::split_csv_line(line);
  if (header.size() != 1 || detail::trim(header[0]) != "value") {
    throw io_error(path + ": expected header 'value'");
  }
  std::vector<double> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 1) {
      throw io_error(path + ": expected 1 column at row " + std::to_string(row));
    }
    out.push_back(detail::parse_double_cell(cells[0], row, path.c_str()));
  }
  if (out.empty()) throw io_error(path + ": no data rows");
  return out;
}

/// Read a `time,value` CSV of record observations. Times must be strictly
/// increasing positive integers; value ordering is checked by the consumers
/// that require it.
inline RecordSequence read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  const auto header = detail::split_csv_line(line);
  if (header.size() != 2 || detail::trim(header[0]) != "time" ||
      detail::trim(header[1]) != "value") {
    throw io_error(path + ": expected header 'time,value'");
  }
  RecordSequence rec;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 2) {
      throw io_error(path + ": expected 2 columns at row " +
                     std::to_string(row));
    }
    const double t = detail::parse_double_cell(cells[0], row, path.c_str());
    if (!(t > 0.0) || t != std::floor(t)) {
      throw io_error(path + ": time must be a positive integer at row " +
                     std::to_string(row));
    }
    const auto ti = static_cast<std::size_t>(t);
    if (!rec.times.empty() && ti <= rec.times.back()) {
      throw io_error(path + ": times must be strictly increasing at row " +
                     std::to_string(row));
    }
    rec.times.push_back(ti);
    rec.values.push_back(detail::parse_double_cell(cells[1], row, path.c_str()));
  }
  if (rec.values.empty()) throw io_error(path + ": no data rows");
  rec.source_n = rec.times.back();
  return rec;
}

inline void write_records_csv(std::ostream& out, const RecordSequence& rec) {
  out << "time,value\n";
  for (std::size_t i = 0; i < rec.values.size(); ++i) {
    out << rec.times[i] << ',' << detail::fmt_g17(rec.values[i]) << '\n';
  }
}

/// Write a rectangular table as CSV with %.17g cells already rendered by the
/// caller. Deterministic byte-for-byte given identical rows.
inline void write_table_csv(std::ostream& out,
                            const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) {
      throw argument_error("write_table_csv: ragged row");
    }
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << ',';
      out << r[j];
    }
    out << '\n';
  }
}

/// One polyline on a chart.
struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step =
      mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 0.5 * step; t += step) ticks.push_back(t);
  return ticks;
}

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

/// Self-contained SVG line chart. With log_y, points with y <= 0 are dropped
/// and the axis ticks sit on powers of ten.
inline std::string render_line_chart(const std::string& title,
                                     const std::string& x_label,
                                     const std::string& y_label,
                                     const std::vector<ChartSeries>& series,
                                     bool log_y = false) {
  constexpr double W = 760, H = 480;
  constexpr double ML = 78, MR = 24, MT = 46, MB = 58;
  const double plot_w = W - ML - MR;
  const double plot_h = H - MT - MB;

  double xmin = detail::kInf, xmax = -detail::kInf;
  double ymin = detail::kInf, ymax = -detail::kInf;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (log_y && !(y > 0.0)) continue;
      const double yy = log_y ? std::log10(y) : y;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, yy);
      ymax = std::max(ymax, yy);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (!std::isfinite(ymin)) {
    ymin = 0.0;
    ymax = 1.0;
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * plot_w;
  };
  const auto py = [&](double yy) {
    return MT + (ymax - yy) / (ymax - ymin) * plot_h;
  };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' ' << H
      << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";

  // Axes frame.
  svg << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  for (const double t : detail::nice_ticks(xmin, xmax)) {
    const double X = px(t);
    svg << "<line x1=\"" << detail::svg_num(X) << "\" y1=\"" << MT + plot_h
        << "\" x2=\"" << detail::svg_num(X) << "\" y2=\"" << MT + plot_h + 5
        << "\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << detail::svg_num(X) << "\" y=\"" << MT + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << detail::tick_label(t) << "</text>\n";
  }
  std::vector<double> yticks;
  if (log_y) {
    for (double d = std::floor(ymin); d <= std::ceil(ymax); d += 1.0) {
      if (d >= ymin && d <= ymax) yticks.push_back(d);
    }
    if (yticks.empty()) yticks = detail::nice_ticks(ymin, ymax);
  } else {
    yticks = detail::nice_ticks(ymin, ymax);
  }
  for (const double t : yticks) {
    const double Y = py(t);
    svg << "<line x1=\"" << ML - 5 << "\" y1=\"" << detail::svg_num(Y)
        << "\" x2=\"" << ML << "\" y2=\"" << detail::svg_num(Y)
        << "\" stroke=\"#333333\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << detail::svg_num(Y)
        << "\" x2=\"" << ML + plot_w << "\" y2=\"" << detail::svg_num(Y)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    const std::string lab =
        log_y ? ("1e" + detail::tick_label(t)) : detail::tick_label(t);
    svg << "<text x=\"" << ML - 9 << "\" y=\"" << detail::svg_num(Y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << lab << "</text>\n";
  }

  svg << "<text x=\"" << ML + plot_w / 2 << "\" y=\"" << H - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << x_label << "</text>\n";
  svg << "<text x=\"20\" y=\"" << MT + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 20 "
      << MT + plot_h / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % 6];
    std::string pts;
    for (const auto& [x, y] : series[si].points) {
      if (log_y && !(y > 0.0)) continue;
      const double yy = log_y ? std::log10(y) : y;
      pts += detail::svg_num(px(x)) + "," + detail::svg_num(py(yy)) + " ";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\" points=\"" << pts << "\"/>\n";
    const double ly = MT + 16 + 16 * static_cast<double>(si);
    svg << "<line x1=\"" << ML + plot_w - 150 << "\" y1=\"" << ly - 4
        << "\" x2=\"" << ML + plot_w - 126 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
    svg << "<text x=\"" << ML + plot_w - 120 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << series[si].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace recmle
