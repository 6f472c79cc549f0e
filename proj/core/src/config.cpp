#include "wlks/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "wlks/error.hpp"

namespace wlks {

namespace grids {

std::vector<std::size_t> iterations() { return {1, 2, 3, 4, 5}; }

std::vector<double> regularization() {
  std::vector<double> out;
  for (int e = 3; e <= 14; ++e) out.push_back(std::ldexp(1.0, e) / 100.0);
  return out;
}

std::vector<double> alpha0() { return {0.999, 0.99, 0.9, 0.5, 0.1, 0.01, 0.001}; }

std::vector<double> alpha_feature() { return {0.0001, 0.001, 0.01, 0.05, 0.1, 0.15, 0.2, 0.25}; }

}  // namespace grids

const char* to_string(FeatureSource s) noexcept {
  switch (s) {
    case FeatureSource::kNone: return "none";
    case FeatureSource::kRaw: return "raw";
    case FeatureSource::kContinuousWl: return "cwl";
    case FeatureSource::kRwse: return "rwse";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string join_hops(const std::vector<Hop>& hops) {
  std::string s;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    if (i) s += ',';
    s += hops[i].to_string();
  }
  return s;
}

void ExperimentConfig::validate() const {
  if (!dataset_dir && !task) throw ConfigError("config: either dataset or task must be set");
  if (hops.empty()) throw ConfigError("config: hops must not be empty");
  for (std::size_t i = 0; i < hops.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (hops[i] == hops[j]) throw ConfigError("config: duplicate hop " + hops[i].to_string());
    }
  }
  if (iterations_grid.empty() || combine_grid.empty() || normalize_grid.empty() || c_grid.empty()) {
    throw ConfigError("config: grids must not be empty");
  }
  for (double c : c_grid) {
    if (!(c > 0)) throw ConfigError("config: C values must be positive");
  }
  if (mixes_hops()) {
    if (alpha0_grid.empty()) throw ConfigError("config: alpha0 grid must not be empty");
    for (double a : alpha0_grid) {
      if (!(a > 0 && a < 1)) throw ConfigError("config: alpha0 must lie in (0, 1)");
    }
  }
  if (feature_source != FeatureSource::kNone) {
    if (alpha_feature_grid.empty()) throw ConfigError("config: alpha_feature grid must not be empty");
    for (double a : alpha_feature_grid) {
      if (!(a > 0)) throw ConfigError("config: alpha_feature must be positive");
    }
    if (feature_source == FeatureSource::kRwse && rwse_length == 0) throw ConfigError("config: rwse_length >= 1");
  }
  if (rbf_gamma && !(*rbf_gamma > 0)) throw ConfigError("config: gamma must be positive");
  if (repeats == 0) throw ConfigError("config: repeats must be >= 1");
  if (task) task->validate();
}

MixSpec ExperimentConfig::mix_for(std::optional<double> alpha0, std::optional<double> alpha_feature) const {
  MixSpec spec;
  spec.feature_alpha = alpha_feature;
  if (hops.size() == 1) {
    spec.entries.push_back({hops[0], 1.0});
    return spec;
  }
  if (!alpha0) throw ConfigError("config: alpha0 required when mixing several hops");
  std::size_t lead = 0;
  for (std::size_t i = 0; i < hops.size(); ++i) {
    if (hops[i] == Hop(0)) lead = i;
  }
  const double rest = (1.0 - *alpha0) / static_cast<double>(hops.size() - 1);
  for (std::size_t i = 0; i < hops.size(); ++i) spec.entries.push_back({hops[i], i == lead ? *alpha0 : rest});
  return spec;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> list_of(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = v.find(',', start);
    const auto tok = trim(v.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!tok.empty()) out.push_back(tok);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("config: " + std::string(key) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("config: " + std::string(key) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view s) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("config: " + std::string(key) + ": bad boolean '" + std::string(s) + "'");
}

std::vector<double> double_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto tok : list_of(v)) out.push_back(to_double(key, tok));
  return out;
}

std::vector<bool> bool_list(std::string_view key, std::string_view v) {
  std::vector<bool> out;
  for (auto tok : list_of(v)) out.push_back(to_bool(key, tok));
  return out;
}

TaskSpec& task_of(ExperimentConfig& cfg) {
  if (!cfg.task) cfg.task = TaskSpec::defaults(TaskKind::kDensity);
  return *cfg.task;
}

}  // namespace

void set_config_key(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  if (key == "dataset") {
    cfg.dataset_dir = std::filesystem::path(std::string(value));
  } else if (key == "task") {
    const auto kind = parse_task_kind(value);
    const auto seed = cfg.task ? cfg.task->seed : 0;
    cfg.task = TaskSpec::defaults(kind);
    cfg.task->seed = seed;
  } else if (key == "nodes") {
    task_of(cfg).num_nodes = to_uint(key, value);
  } else if (key == "mean_degree") {
    task_of(cfg).mean_degree = to_double(key, value);
  } else if (key == "subgraphs") {
    task_of(cfg).num_subgraphs = to_uint(key, value);
  } else if (key == "size") {
    const auto parts = list_of(value);
    if (parts.empty() || parts.size() > 2) throw ConfigError("config: size: expected 'n' or 'min,max'");
    task_of(cfg).min_size = to_uint(key, parts.front());
    task_of(cfg).max_size = to_uint(key, parts.back());
  } else if (key == "classes") {
    task_of(cfg).num_classes = to_uint(key, value);
  } else if (key == "hops") {
    cfg.hops.clear();
    for (auto tok : list_of(value)) cfg.hops.push_back(Hop::parse(tok));
  } else if (key == "T" || key == "iterations") {
    cfg.iterations_grid.clear();
    for (auto tok : list_of(value)) cfg.iterations_grid.push_back(to_uint(key, tok));
  } else if (key == "combine") {
    cfg.combine_grid = bool_list(key, value);
  } else if (key == "normalize") {
    cfg.normalize_grid = bool_list(key, value);
  } else if (key == "C") {
    cfg.c_grid = double_list(key, value);
  } else if (key == "alpha0") {
    cfg.alpha0_grid = double_list(key, value);
  } else if (key == "feature") {
    if (value == "none") {
      cfg.feature_source = FeatureSource::kNone;
    } else if (value == "raw") {
      cfg.feature_source = FeatureSource::kRaw;
    } else if (value == "cwl") {
      cfg.feature_source = FeatureSource::kContinuousWl;
    } else if (value == "rwse") {
      cfg.feature_source = FeatureSource::kRwse;
    } else {
      throw ConfigError("config: feature must be none, raw, cwl or rwse");
    }
  } else if (key == "feature_kernel") {
    if (value == "linear") {
      cfg.feature_kind = FeatureKernelKind::kLinear;
    } else if (value == "rbf") {
      cfg.feature_kind = FeatureKernelKind::kRbf;
    } else {
      throw ConfigError("config: feature_kernel must be linear or rbf");
    }
  } else if (key == "gamma") {
    cfg.rbf_gamma = to_double(key, value);
  } else if (key == "alpha_feature") {
    cfg.alpha_feature_grid = double_list(key, value);
  } else if (key == "rwse_length") {
    cfg.rwse_length = to_uint(key, value);
  } else if (key == "cwl_iterations") {
    cfg.cwl_iterations = to_uint(key, value);
  } else if (key == "k0_induced") {
    cfg.k0_induced = to_bool(key, value);
  } else if (key == "mark_internal") {
    cfg.mark_internal = to_bool(key, value);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, value);
    if (cfg.task) cfg.task->seed = cfg.seed;
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(to_uint(key, value));
  } else if (key == "repeats") {
    cfg.repeats = to_uint(key, value);
  } else if (key == "smo_tol") {
    cfg.smo.tol = to_double(key, value);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    set_config_key(base, trim(body.substr(0, eq)), body.substr(eq + 1));
  }
  if (base.task) base.task->seed = base.seed;
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

}  // namespace wlks
