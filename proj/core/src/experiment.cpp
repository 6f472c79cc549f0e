#include "wlks/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "wlks/error.hpp"
#include "wlks/features.hpp"
#include "wlks/parallel.hpp"

namespace wlks {

void PhaseClock::add(std::string_view label, double seconds) {
  auto it = totals_.find(label);
  if (it == totals_.end()) it = totals_.emplace(std::string(label), 0.0).first;
  it->second += seconds;
}

double PhaseClock::seconds(std::string_view label) const {
  const auto it = totals_.find(label);
  return it == totals_.end() ? 0.0 : it->second;
}

namespace {

std::vector<Subgraph> gather(const SubgraphSet& set, std::span<const std::size_t> rows) {
  std::vector<Subgraph> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(set.subgraphs.at(r));
  return out;
}

FeatureMatrix take_rows(const FeatureMatrix& x, std::span<const std::size_t> rows) {
  FeatureMatrix out(rows.size(), x.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(x.row(rows[i]).begin(), x.cols, out.values.begin() + static_cast<std::ptrdiff_t>(i * x.cols));
  }
  return out;
}

std::vector<std::size_t> iota_n(std::size_t first, std::size_t count) {
  std::vector<std::size_t> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = first + i;
  return v;
}

std::vector<LabelSet> labels_at(const SubgraphSet& set, std::span<const std::size_t> rows) {
  std::vector<LabelSet> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(set.labels.at(r));
  return out;
}

/// Structure mixture (plus the optional feature term) for a grid point.
KernelMatrix mixed(const ExperimentConfig& cfg, const GridPoint& p, std::span<const KernelMatrix> hops,
                   const KernelMatrix* feature) {
  std::vector<const KernelMatrix*> ptrs;
  for (const auto& k : hops) ptrs.push_back(&k);
  return mix(cfg.mix_for(p.alpha0, p.alpha_feature), ptrs, p.alpha_feature ? feature : nullptr);
}

}  // namespace

KernelPipeline::KernelPipeline(const Dataset& data, const ExperimentConfig& cfg) : data_(&data), cfg_(&cfg) {}

void KernelPipeline::prepare(std::span<const std::size_t> train, std::span<const std::size_t> eval,
                             std::size_t max_iterations) {
  const auto train_subs = gather(data_->subgraphs, train);
  const auto eval_subs = gather(data_->subgraphs, eval);
  WlsOptions opts;
  opts.iterations = max_iterations;
  opts.k0_induced = cfg_->k0_induced;
  opts.mark_internal = cfg_->mark_internal;
  opts.threads = cfg_->threads;

  GlobalColoringCache cache(data_->graph, table_);
  train_stacks_.clear();
  eval_stacks_.clear();
  for (const auto hop : cfg_->hops) {
    train_stacks_.push_back(wls_batch(data_->graph, train_subs, hop, opts, table_, &cache));
    eval_stacks_.push_back(wls_batch(data_->graph, eval_subs, hop, opts, table_, &cache, {}, train.size()));
  }
  max_iterations_ = max_iterations;
}

KernelPipeline::HopGrams KernelPipeline::hop_grams(std::size_t iterations, bool combine, bool normalize) const {
  if (iterations > max_iterations_) throw ContractError("hop_grams: T exceeds the prepared iteration count");
  const GramOptions opts{iterations, combine, normalize, cfg_->threads};
  HopGrams out;
  for (std::size_t h = 0; h < train_stacks_.size(); ++h) {
    out.train.push_back(gram_from_histograms(train_stacks_[h], opts));
    out.cross.push_back(cross_gram(eval_stacks_[h], train_stacks_[h], opts));
  }
  return out;
}

std::vector<KernelMatrix> KernelPipeline::hop_cross(std::size_t iterations, bool combine, bool normalize,
                                                    std::size_t first, std::size_t count) const {
  const GramOptions opts{iterations, combine, normalize, cfg_->threads};
  std::vector<KernelMatrix> out;
  for (std::size_t h = 0; h < train_stacks_.size(); ++h) {
    const std::span<const HistogramStack> rows(eval_stacks_[h].data() + first, count);
    out.push_back(cross_gram(rows, train_stacks_[h], opts));
  }
  return out;
}

void KernelPipeline::prepare_features(std::span<const std::size_t> train, std::span<const std::size_t> eval) {
  features_.reset();
  if (cfg_->feature_source == FeatureSource::kNone) return;

  const auto& subs = data_->subgraphs.subgraphs;
  FeatureMatrix per_subgraph;
  if (cfg_->feature_source == FeatureSource::kRwse) {
    per_subgraph = rwse_subgraph_features(data_->graph, subs, cfg_->rwse_length, cfg_->threads);
  } else {
    if (!data_->features) throw DataError("feature kernel requested but the dataset has no node features");
    if (cfg_->feature_source == FeatureSource::kContinuousWl) {
      const auto embedded = continuous_wl_embed(data_->graph, *data_->features, cfg_->cwl_iterations, cfg_->threads);
      per_subgraph = aggregate_sum(embedded, subs);
    } else {
      per_subgraph = aggregate_sum(*data_->features, subs);
    }
  }

  // Statistics come from train rows only.
  const auto scaler = Standardizer::fit(per_subgraph, train);
  const auto z = scaler.transform(per_subgraph);
  const auto z_train = take_rows(z, train);
  const auto z_eval = take_rows(z, eval);
  const FeatureKernelSpec spec{cfg_->feature_kind, cfg_->rbf_gamma};
  features_ = FeatureGrams{feature_gram(z_train, nullptr, spec), feature_gram(z_eval, &z_train, spec)};
}

Dataset load_experiment_data(const ExperimentConfig& cfg) {
  if (cfg.dataset_dir) return read_dataset(*cfg.dataset_dir);
  if (!cfg.task) throw ConfigError("config: either dataset or task must be set");
  auto spec = *cfg.task;
  if (cfg.feature_source == FeatureSource::kRaw || cfg.feature_source == FeatureSource::kContinuousWl) {
    spec.with_features = true;
  }
  return gen_task(spec).data;
}

std::string dataset_id(const ExperimentConfig& cfg) {
  if (cfg.dataset_dir) return cfg.dataset_dir->generic_string();
  const auto& t = *cfg.task;
  std::ostringstream s;
  s << "generated:" << to_string(t.task) << ":n" << t.num_nodes << ":deg" << format_double(t.mean_degree) << ":m"
    << t.num_subgraphs << ":size" << t.min_size;
  if (t.max_size != t.min_size) s << '-' << t.max_size;
  s << ":classes" << t.num_classes << ":seed" << t.seed;
  return s.str();
}

std::size_t select_best(std::span<const GridPoint> grid) {
  if (grid.empty()) throw ContractError("select_best: empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].val_f1 > grid[best].val_f1) best = i;
  }
  return best;
}

namespace {

ExperimentResult run_once(const ExperimentConfig& cfg, const Dataset& data) {
  const auto& set = data.subgraphs;
  const auto train = set.indices(Split::kTrain);
  const auto val = set.indices(Split::kVal);
  const auto test = set.indices(Split::kTest);
  if (train.empty() || val.empty() || test.empty()) {
    throw DataError("experiment: train, val and test splits must all be non-empty");
  }
  std::vector<std::size_t> eval(val);
  eval.insert(eval.end(), test.begin(), test.end());
  const auto val_rows = iota_n(0, val.size());
  const auto test_rows = iota_n(val.size(), test.size());
  const auto all_train_cols = iota_n(0, train.size());
  const auto train_labels = labels_at(set, train);
  const auto val_labels = labels_at(set, val);
  const auto test_labels = labels_at(set, test);

  PhaseClock clock;
  const auto total_start = std::chrono::steady_clock::now();
  const auto t_max = *std::max_element(cfg.iterations_grid.begin(), cfg.iterations_grid.end());

  KernelPipeline pipe(data, cfg);
  clock.time_phase("wl", [&] { pipe.prepare(train, eval, t_max); });
  clock.time_phase("kernel", [&] { pipe.prepare_features(train, eval); });
  const auto* feat = pipe.feature_grams();

  std::vector<std::optional<double>> alpha0s{std::nullopt};
  if (cfg.mixes_hops()) alpha0s.assign(cfg.alpha0_grid.begin(), cfg.alpha0_grid.end());
  std::vector<std::optional<double>> alpha_fs{std::nullopt};
  if (feat) alpha_fs.assign(cfg.alpha_feature_grid.begin(), cfg.alpha_feature_grid.end());

  std::vector<GridPoint> grid;
  for (const auto t : cfg.iterations_grid) {
    for (const bool combine : cfg.combine_grid) {
      for (const bool normalize : cfg.normalize_grid) {
        KernelPipeline::HopGrams grams;
        clock.time_phase("kernel", [&] { grams = pipe.hop_grams(t, combine, normalize); });
        for (const auto& a0 : alpha0s) {
          for (const auto& af : alpha_fs) {
            GridPoint base{t, combine, normalize, a0, af, 0.0, 0.0};
            KernelMatrix k_train;
            KernelMatrix k_val;
            clock.time_phase("kernel", [&] {
              k_train = mixed(cfg, base, grams.train, feat ? &feat->train : nullptr);
              k_val = mixed(cfg, base, grams.cross, feat ? &feat->cross : nullptr).select(val_rows, all_train_cols);
            });
            std::vector<GridPoint> points(cfg.c_grid.size(), base);
            clock.time_phase("svm", [&] {
              // Grid points are independent; each SVM ensemble trains on one worker.
              parallel_for(cfg.c_grid.size(), cfg.threads, [&](std::size_t ci) {
                points[ci].C = cfg.c_grid[ci];
                const auto m = fit_multiclass(k_train, train_labels, set.num_classes, cfg.c_grid[ci],
                                              set.multi_label, cfg.smo, 1);
                points[ci].val_f1 = micro_f1(m.predict(k_val), val_labels);
              });
            });
            grid.insert(grid.end(), points.begin(), points.end());
          }
        }
      }
    }
  }

  ExperimentResult result;
  auto& report = result.report;
  report.dataset_id = cfg.dataset_dir || cfg.task ? dataset_id(cfg) : "";
  report.hops = join_hops(cfg.hops);
  report.feature = to_string(cfg.feature_source);
  report.train_size = train.size();
  report.val_size = val.size();
  report.test_size = test.size();
  report.selected = select_best(grid);
  report.grid = std::move(grid);
  const auto& best = report.selected_point();

  // Refit the selected point; SMO is deterministic, so this is the model the grid scored.
  MulticlassModel model;
  clock.time_phase("svm", [&] {
    const auto grams = pipe.hop_grams(best.iterations, best.combine, best.normalize);
    const auto k_train = mixed(cfg, best, grams.train, feat ? &feat->train : nullptr);
    model = fit_multiclass(k_train, train_labels, set.num_classes, best.C, set.multi_label, cfg.smo, cfg.threads);
  });

  std::vector<LabelSet> predicted;
  clock.time_phase("inference", [&] {
    const auto cross = pipe.hop_cross(best.iterations, best.combine, best.normalize, val.size(), test.size());
    const KernelMatrix feat_test = feat ? feat->cross.select(test_rows, all_train_cols) : KernelMatrix{};
    predicted = model.predict(mixed(cfg, best, cross, feat ? &feat_test : nullptr));
  });
  report.test_f1 = micro_f1(predicted, test_labels);

  report.timings.wl = clock.seconds("wl");
  report.timings.kernel = clock.seconds("kernel");
  report.timings.svm = clock.seconds("svm");
  report.timings.inference = clock.seconds("inference");
  report.timings.total = std::chrono::duration<double>(std::chrono::steady_clock::now() - total_start).count();

  result.model = TrainedModel{best, train, std::move(model)};
  return result;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentResult run_experiment_with_model(const ExperimentConfig& cfg, const Dataset& data) {
  cfg.validate();
  auto result = run_once(cfg, data);
  if (cfg.repeats > 1) {
    // Scores are deterministic; repeats only tighten the timing estimates.
    std::vector<PhaseTimings> runs{result.report.timings};
    for (std::size_t r = 1; r < cfg.repeats; ++r) runs.push_back(run_once(cfg, data).report.timings);
    auto pick = [&](double PhaseTimings::*field) {
      std::vector<double> v;
      for (const auto& t : runs) v.push_back(t.*field);
      return median_of(std::move(v));
    };
    auto& t = result.report.timings;
    t.wl = pick(&PhaseTimings::wl);
    t.kernel = pick(&PhaseTimings::kernel);
    t.svm = pick(&PhaseTimings::svm);
    t.total = pick(&PhaseTimings::total);
    t.inference = pick(&PhaseTimings::inference);
  }
  return result;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto data = load_experiment_data(cfg);
  return run_experiment_with_model(cfg, data).report;
}

void write_trained_model(const TrainedModel& m, const ExperimentConfig& cfg, std::ostream& out) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); };
  out << "wlks-model 1\n";
  out << "hops=" << join_hops(cfg.hops) << '\n';
  out << "T=" << m.point.iterations << '\n';
  out << "combine=" << (m.point.combine ? 1 : 0) << '\n';
  out << "normalize=" << (m.point.normalize ? 1 : 0) << '\n';
  out << "alpha0=" << opt(m.point.alpha0) << '\n';
  out << "alpha_feature=" << opt(m.point.alpha_feature) << '\n';
  out << "C=" << format_double(m.point.C) << '\n';
  out << "k0_induced=" << (cfg.k0_induced ? 1 : 0) << '\n';
  out << "mark_internal=" << (cfg.mark_internal ? 1 : 0) << '\n';
  out << "feature=" << to_string(cfg.feature_source) << '\n';
  out << "feature_kernel=" << (cfg.feature_kind == FeatureKernelKind::kRbf ? "rbf" : "linear") << '\n';
  out << "gamma=" << opt(cfg.rbf_gamma) << '\n';
  out << "rwse_length=" << cfg.rwse_length << '\n';
  out << "cwl_iterations=" << cfg.cwl_iterations << '\n';
  out << "train=";
  for (std::size_t i = 0; i < m.train_indices.size(); ++i) out << (i ? "," : "") << m.train_indices[i];
  out << "\nsvm\n";
  write_model(m.model, out);
}

TrainedModel read_trained_model(std::istream& in, ExperimentConfig& cfg) {
  std::string line;
  if (!std::getline(in, line) || line != "wlks-model 1") throw ParseError("model: missing 'wlks-model 1' header", 1);
  TrainedModel m;
  std::size_t line_no = 1;
  bool saw_svm = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line == "svm") {
      saw_svm = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("model: expected key=value", line_no);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "train") {
        m.train_indices.clear();
        std::size_t start = 0;
        while (start < value.size()) {
          const auto comma = value.find(',', start);
          const auto tok = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
          std::size_t v = 0;
          auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
          if (ec != std::errc() || ptr != tok.data() + tok.size()) throw ParseError("model: bad train index", line_no);
          m.train_indices.push_back(v);
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        continue;
      }
      if (value == "none") {
        if (key == "gamma") cfg.rbf_gamma.reset();
        continue;
      }
      set_config_key(cfg, key, value);
      if (key == "T") m.point.iterations = cfg.iterations_grid.at(0);
      if (key == "combine") m.point.combine = cfg.combine_grid.at(0);
      if (key == "normalize") m.point.normalize = cfg.normalize_grid.at(0);
      if (key == "alpha0") m.point.alpha0 = cfg.alpha0_grid.at(0);
      if (key == "alpha_feature") m.point.alpha_feature = cfg.alpha_feature_grid.at(0);
      if (key == "C") m.point.C = cfg.c_grid.at(0);
    } catch (const ConfigError& e) {
      throw ParseError(std::string("model: ") + e.what(), line_no);
    }
  }
  if (!saw_svm) throw ParseError("model: missing 'svm' section", line_no);
  m.model = read_model(in, m.train_indices.size());
  return m;
}

EvalResult evaluate_model(const TrainedModel& m, const ExperimentConfig& cfg, const Dataset& data,
                          std::span<const std::size_t> rows) {
  const auto& set = data.subgraphs;
  for (auto r : m.train_indices) {
    if (r >= set.size()) throw DataError("model: train index beyond the dataset");
  }
  if (m.model.num_classes() != set.num_classes) throw DataError("model: class count differs from the dataset");
  KernelPipeline pipe(data, cfg);
  pipe.prepare(m.train_indices, rows, m.point.iterations);
  pipe.prepare_features(m.train_indices, rows);
  const auto* feat = pipe.feature_grams();
  const auto cross = pipe.hop_cross(m.point.iterations, m.point.combine, m.point.normalize, 0, rows.size());
  EvalResult out;
  out.predictions = m.model.predict(mixed(cfg, m.point, cross, feat ? &feat->cross : nullptr));
  out.f1 = micro_f1(out.predictions, labels_at(set, rows));
  return out;
}

}  // namespace wlks
