#include "wlks/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

#include "wlks/error.hpp"

namespace wlks {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); }

std::string point_text(const GridPoint& p) {
  std::string s;
  s += "T:" + std::to_string(p.iterations);
  s += std::string(" combine:") + (p.combine ? "1" : "0");
  s += std::string(" normalize:") + (p.normalize ? "1" : "0");
  s += " alpha0:" + opt(p.alpha0);
  s += " alpha_feature:" + opt(p.alpha_feature);
  s += " C:" + format_double(p.C);
  s += " val_f1:" + format_double(p.val_f1);
  return s;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("report: bad number '" + s + "'", line);
  return v;
}

std::size_t to_size(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("report: bad integer '" + s + "'", line);
  }
  return v;
}

GridPoint parse_point(const std::string& text, std::size_t line) {
  std::map<std::string, std::string> fields;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(' ', start);
    if (end == std::string::npos) end = text.size();
    const auto tok = text.substr(start, end - start);
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError("report: bad grid field '" + tok + "'", line);
    fields[tok.substr(0, colon)] = tok.substr(colon + 1);
    start = end + 1;
  }
  auto need = [&](const char* k) -> const std::string& {
    const auto it = fields.find(k);
    if (it == fields.end()) throw ParseError(std::string("report: grid point lacks ") + k, line);
    return it->second;
  };
  auto maybe = [&](const char* k) -> std::optional<double> {
    const auto& v = need(k);
    if (v == "none") return std::nullopt;
    return to_double(v, line);
  };
  GridPoint p;
  p.iterations = to_size(need("T"), line);
  p.combine = need("combine") == "1";
  p.normalize = need("normalize") == "1";
  p.alpha0 = maybe("alpha0");
  p.alpha_feature = maybe("alpha_feature");
  p.C = to_double(need("C"), line);
  p.val_f1 = to_double(need("val_f1"), line);
  return p;
}

std::string grid_key(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "grid.%05zu", i);
  return buf;
}

}  // namespace

void write_report(const RunReport& r, std::ostream& out) {
  out << "dataset=" << r.dataset_id << '\n';
  out << "hops=" << r.hops << '\n';
  out << "feature=" << r.feature << '\n';
  out << "split.train=" << r.train_size << '\n';
  out << "split.val=" << r.val_size << '\n';
  out << "split.test=" << r.test_size << '\n';
  out << "grid.count=" << r.grid.size() << '\n';
  for (std::size_t i = 0; i < r.grid.size(); ++i) out << grid_key(i) << '=' << point_text(r.grid[i]) << '\n';
  out << "selected.index=" << r.selected << '\n';
  if (r.selected < r.grid.size()) out << "selected.config=" << point_text(r.grid[r.selected]) << '\n';
  out << "val_f1=" << format_double(r.selected < r.grid.size() ? r.grid[r.selected].val_f1 : 0.0) << '\n';
  out << "test_f1=" << format_double(r.test_f1) << '\n';
}

void write_timings(const PhaseTimings& t, std::ostream& out) {
  out << "timing.wl_seconds=" << format_double(t.wl) << '\n';
  out << "timing.kernel_seconds=" << format_double(t.kernel) << '\n';
  out << "timing.svm_seconds=" << format_double(t.svm) << '\n';
  out << "timing.total_seconds=" << format_double(t.total) << '\n';
  out << "timing.inference_seconds=" << format_double(t.inference) << '\n';
}

RunReport parse_report(std::istream& in) {
  RunReport r;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> count;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("report: expected key=value", line_no);
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "dataset") {
      r.dataset_id = value;
    } else if (key == "hops") {
      r.hops = value;
    } else if (key == "feature") {
      r.feature = value;
    } else if (key == "split.train") {
      r.train_size = to_size(value, line_no);
    } else if (key == "split.val") {
      r.val_size = to_size(value, line_no);
    } else if (key == "split.test") {
      r.test_size = to_size(value, line_no);
    } else if (key == "grid.count") {
      count = to_size(value, line_no);
    } else if (key.rfind("grid.", 0) == 0) {
      if (to_size(key.substr(5), line_no) != r.grid.size()) throw ParseError("report: grid entries out of order", line_no);
      r.grid.push_back(parse_point(value, line_no));
    } else if (key == "selected.index") {
      r.selected = to_size(value, line_no);
    } else if (key == "test_f1") {
      r.test_f1 = to_double(value, line_no);
    } else if (key == "selected.config" || key == "val_f1") {
      // Derived from the grid; kept for readers of the raw file.
    } else if (key.rfind("timing.", 0) == 0) {
      // Timings normally live in a separate file but are accepted inline.
    } else {
      throw ParseError("report: unknown key '" + key + "'", line_no);
    }
  }
  if (count && *count != r.grid.size()) throw ParseError("report: grid.count does not match the grid lines", line_no);
  if (!r.grid.empty() && r.selected >= r.grid.size()) throw ParseError("report: selected index out of range", line_no);
  return r;
}

PhaseTimings parse_timings(std::istream& in) {
  PhaseTimings t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("timings: expected key=value", line_no);
    const auto key = line.substr(0, eq);
    const double v = to_double(line.substr(eq + 1), line_no);
    if (key == "timing.wl_seconds") {
      t.wl = v;
    } else if (key == "timing.kernel_seconds") {
      t.kernel = v;
    } else if (key == "timing.svm_seconds") {
      t.svm = v;
    } else if (key == "timing.total_seconds") {
      t.total = v;
    } else if (key == "timing.inference_seconds") {
      t.inference = v;
    } else {
      throw ParseError("timings: unknown key '" + key + "'", line_no);
    }
  }
  return t;
}

void emit_report(const RunReport& report, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report " + path.string());
    write_report(report, out);
    if (!out) throw ConfigError("failed writing report " + path.string());
  }
  auto timings_path = path;
  timings_path += ".timings";
  std::ofstream out(timings_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write timings " + timings_path.string());
  write_timings(report.timings, out);
}

}  // namespace wlks
