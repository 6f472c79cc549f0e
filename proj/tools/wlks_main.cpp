// wlks: command line driver for WL subgraph kernels.
//
//   wlks gen    --task density --seed 1 --out data/density
//   wlks trace  --dataset data/density --hops 1 --T 3 --subgraph 0
//   wlks kernel --dataset data/density --hops 0,global --T 2 --alpha0 0.9 --out k.txt
//   wlks train  --dataset data/density --threads 4 --out report.txt --model model.txt
//   wlks eval   --dataset data/density --model model.txt --split test
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wlks/config.hpp"
#include "wlks/datagen.hpp"
#include "wlks/error.hpp"
#include "wlks/experiment.hpp"
#include "wlks/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Config keys exposed as --flags (underscores become dashes).
const std::vector<std::string> kExperimentKeys = {
    "dataset",  "task",  "nodes",         "mean_degree",    "subgraphs", "size",          "classes",
    "hops",     "T",     "combine",       "normalize",      "C",         "alpha0",        "feature",
    "feature_kernel", "gamma", "alpha_feature", "rwse_length", "cwl_iterations", "k0_induced", "mark_internal",
    "repeats",  "smo_tol"};

struct ConfigFlags {
  std::string config_file;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::string> values;

  void attach(CLI::App* app, const std::vector<std::string>& keys) {
    app->add_option("--config", config_file, "key=value config file; flags override its keys");
    values.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      std::string flag = keys[i];
      for (auto& ch : flag) {
        if (ch == '_') ch = '-';
      }
      options.emplace_back(keys[i], app->add_option("--" + flag, values[i], "sets config key '" + keys[i] + "'"));
    }
  }

  wlks::ExperimentConfig build(std::uint64_t seed, unsigned threads, bool seed_given) const {
    wlks::ExperimentConfig cfg;
    if (!config_file.empty()) cfg = wlks::load_config(config_file);
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i].second->count() > 0) wlks::set_config_key(cfg, options[i].first, values[i]);
    }
    if (seed_given) wlks::set_config_key(cfg, "seed", std::to_string(seed));
    cfg.threads = threads;
    return cfg;
  }
};

void warn_dropped(const wlks::GlobalGraph& g) {
  if (g.dropped_self_loops() > 0) {
    std::cerr << "warning: dropped " << g.dropped_self_loops() << " self-loop(s) from the input graph\n";
  }
  if (g.dropped_duplicates() > 0) {
    std::cerr << "warning: dropped " << g.dropped_duplicates() << " duplicate edge(s) from the input graph\n";
  }
}

wlks::Dataset load_data(const wlks::ExperimentConfig& cfg) {
  auto data = wlks::load_experiment_data(cfg);
  warn_dropped(data.graph);
  return data;
}

/// Writes to `path`, or stdout when it is empty or "-".
template <class Fn>
void with_output(const std::string& path, bool binary, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw wlks::ConfigError("cannot write " + path);
  fn(out);
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

int run_gen(const wlks::TaskSpec& spec, const std::string& out_dir) {
  if (out_dir.empty()) throw wlks::ConfigError("gen: --out <directory> is required");
  spec.validate();
  const auto task = wlks::gen_task(spec);
  wlks::write_dataset(task.data, out_dir);
  std::cout << "wrote " << task.data.subgraphs.size() << " subgraphs over " << task.data.graph.num_nodes()
            << " nodes to " << out_dir << '\n';
  return 0;
}

int run_trace(const wlks::ExperimentConfig& cfg, const std::vector<std::size_t>& picks, const std::string& out) {
  const auto data = load_data(cfg);
  const auto& set = data.subgraphs;
  std::vector<wlks::Subgraph> subs;
  const auto idx = picks.empty() ? all_indices(set.size()) : picks;
  for (auto i : idx) {
    if (i >= set.size()) throw wlks::DataError("trace: subgraph index " + std::to_string(i) + " out of range");
    subs.push_back(set.subgraphs[i]);
  }
  wlks::WlsOptions opts;
  opts.iterations = cfg.iterations_grid.front();
  opts.k0_induced = cfg.k0_induced;
  opts.mark_internal = cfg.mark_internal;
  opts.threads = cfg.threads;
  wlks::ColorTable table;
  wlks::GlobalColoringCache cache(data.graph, table);
  with_output(out, false, [&](std::ostream& os) {
    for (const auto hop : cfg.hops) {
      const auto colorings = wlks::wls_colorings(data.graph, subs, hop, opts, table, &cache);
      for (std::size_t s = 0; s < colorings.size(); ++s) {
        const auto& c = colorings[s];
        os << "# subgraph " << idx[s] << " hop " << hop.to_string() << " stable "
           << (c.stable_iteration ? std::to_string(*c.stable_iteration) : std::string("none")) << '\n';
        for (std::size_t t = 0; t < c.colors.size(); ++t) {
          os << "iter " << t << ':';
          for (std::size_t v = 0; v < c.nodes.size(); ++v) os << ' ' << c.nodes[v] << ':' << c.colors[t][v];
          os << '\n';
        }
      }
    }
  });
  return 0;
}

int run_kernel(const wlks::ExperimentConfig& cfg, bool binary, const std::string& out) {
  const auto data = load_data(cfg);
  const auto rows = all_indices(data.subgraphs.size());
  wlks::KernelPipeline pipe(data, cfg);
  const auto t = cfg.iterations_grid.front();
  pipe.prepare(rows, {}, t);
  pipe.prepare_features(rows, {});
  const auto grams = pipe.hop_grams(t, cfg.combine_grid.front(), cfg.normalize_grid.front());
  std::vector<const wlks::KernelMatrix*> ptrs;
  for (const auto& k : grams.train) ptrs.push_back(&k);
  const auto* feat = pipe.feature_grams();
  const std::optional<double> a0 = cfg.mixes_hops() ? std::optional(cfg.alpha0_grid.front()) : std::nullopt;
  const std::optional<double> af = feat ? std::optional(cfg.alpha_feature_grid.front()) : std::nullopt;
  const auto k = wlks::mix(cfg.mix_for(a0, af), ptrs, feat ? &feat->train : nullptr);
  with_output(out, binary, [&](std::ostream& os) {
    if (binary) {
      wlks::write_binary(k, os);
    } else {
      wlks::write_text(k, os);
    }
  });
  return 0;
}

int run_train(const wlks::ExperimentConfig& cfg, const std::string& out, const std::string& model_path) {
  cfg.validate();
  const auto data = load_data(cfg);
  const auto result = wlks::run_experiment_with_model(cfg, data);
  if (out.empty() || out == "-") {
    wlks::write_report(result.report, std::cout);
    wlks::write_timings(result.report.timings, std::cout);
  } else {
    wlks::emit_report(result.report, out);
  }
  if (!model_path.empty()) {
    with_output(model_path, false, [&](std::ostream& os) { wlks::write_trained_model(result.model, cfg, os); });
  }
  std::cerr << "selected " << result.report.selected << " of " << result.report.grid.size()
            << " grid points; val micro-F1 " << result.report.selected_point().val_f1 << ", test micro-F1 "
            << result.report.test_f1 << '\n';
  return 0;
}

int run_eval(wlks::ExperimentConfig cfg, const std::string& model_path, const std::string& split,
             const std::string& out) {
  std::ifstream in(model_path);
  if (!in) throw wlks::ConfigError("cannot open model " + model_path);
  const auto model = wlks::read_trained_model(in, cfg);
  const auto data = load_data(cfg);
  std::vector<std::size_t> rows;
  if (split == "all") {
    rows = all_indices(data.subgraphs.size());
  } else if (split == "train") {
    rows = data.subgraphs.indices(wlks::Split::kTrain);
  } else if (split == "val") {
    rows = data.subgraphs.indices(wlks::Split::kVal);
  } else if (split == "test") {
    rows = data.subgraphs.indices(wlks::Split::kTest);
  } else {
    throw wlks::ConfigError("eval: --split must be train, val, test or all");
  }
  if (rows.empty()) throw wlks::DataError("eval: split '" + split + "' is empty");
  const auto res = wlks::evaluate_model(model, cfg, data, rows);
  with_output(out, false, [&](std::ostream& os) {
    os << "split=" << split << '\n';
    os << "count=" << rows.size() << '\n';
    os << "micro_f1=" << wlks::format_double(res.f1) << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << "pred." << rows[i] << '=';
      for (std::size_t c = 0; c < res.predictions[i].size(); ++c) os << (c ? "," : "") << res.predictions[i][c];
      os << '\n';
    }
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weisfeiler-Lehman subgraph kernels: generate tasks, dump colorings and grams, train and evaluate."};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    sub->add_option("--out", out, "output path ('-' or empty for stdout)");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic subgraph-classification task");
  add_common(gen);
  std::string gen_task_name = "density";
  std::optional<std::size_t> gen_nodes, gen_subgraphs, gen_size, gen_classes;
  std::optional<double> gen_degree;
  bool gen_features = false;
  gen->add_option("--task", gen_task_name, "density | cut-ratio | coreness | component");
  gen->add_option("--nodes", gen_nodes, "nodes in the base graph");
  gen->add_option("--mean-degree", gen_degree, "mean degree of the base graph");
  gen->add_option("--subgraphs", gen_subgraphs, "number of subgraphs");
  gen->add_option("--size", gen_size, "nodes per subgraph");
  gen->add_option("--classes", gen_classes, "number of classes");
  gen->add_flag("--features", gen_features, "also write a per-node features file");

  // trace / kernel / train share the config flags
  auto* trace = app.add_subcommand("trace", "dump per-iteration WL colorings of subgraphs");
  add_common(trace);
  ConfigFlags trace_flags;
  trace_flags.attach(trace, kExperimentKeys);
  std::vector<std::size_t> trace_picks;
  trace->add_option("--subgraph", trace_picks, "subgraph indices to dump (default: all)");

  auto* kernel = app.add_subcommand("kernel", "dump the gram matrix of all subgraphs");
  add_common(kernel);
  ConfigFlags kernel_flags;
  kernel_flags.attach(kernel, kExperimentKeys);
  bool kernel_binary = false;
  kernel->add_flag("--binary", kernel_binary, "little-endian binary dump instead of text");

  auto* train = app.add_subcommand("train", "grid search, model selection on val, scoring on test");
  add_common(train);
  ConfigFlags train_flags;
  train_flags.attach(train, kExperimentKeys);
  std::string train_model;
  train->add_option("--model", train_model, "write the selected model here");

  auto* eval = app.add_subcommand("eval", "re-score a split with a saved model");
  add_common(eval);
  std::string eval_dataset, eval_model, eval_split = "test";
  eval->add_option("--dataset", eval_dataset, "dataset directory")->required();
  eval->add_option("--model", eval_model, "model file written by train")->required();
  eval->add_option("--split", eval_split, "train | val | test | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const bool seed_given = app.get_subcommands().front()->count("--seed") > 0;
  try {
    if (gen->parsed()) {
      auto spec = wlks::TaskSpec::defaults(wlks::parse_task_kind(gen_task_name));
      if (gen_nodes) spec.num_nodes = *gen_nodes;
      if (gen_degree) spec.mean_degree = *gen_degree;
      if (gen_subgraphs) spec.num_subgraphs = *gen_subgraphs;
      if (gen_size) spec.min_size = spec.max_size = *gen_size;
      if (gen_classes) spec.num_classes = *gen_classes;
      spec.with_features = gen_features;
      spec.seed = seed;
      return run_gen(spec, out);
    }
    if (trace->parsed()) return run_trace(trace_flags.build(seed, threads, seed_given), trace_picks, out);
    if (kernel->parsed()) return run_kernel(kernel_flags.build(seed, threads, seed_given), kernel_binary, out);
    if (train->parsed()) return run_train(train_flags.build(seed, threads, seed_given), out, train_model);
    if (eval->parsed()) {
      wlks::ExperimentConfig cfg;
      cfg.dataset_dir = eval_dataset;
      cfg.threads = threads;
      return run_eval(std::move(cfg), eval_model, eval_split, out);
    }
  } catch (const wlks::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wlks::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const wlks::RangeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const wlks::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
