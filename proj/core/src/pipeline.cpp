#include "tmcf/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tmcf/artifacts.hpp"
#include "tmcf/errors.hpp"
#include "tmcf/model_io.hpp"
#include "tmcf/parallel.hpp"
#include "tmcf/synth.hpp"
#include "tmcf/trace_io.hpp"

#ifndef TMCF_VERSION
#define TMCF_VERSION "0.0.0"
#endif

namespace tmcf {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view library_version() { return TMCF_VERSION; }

std::pair<TmSeries, std::optional<Partition>> load_dataset(const DatasetConfig& dataset) {
  std::optional<Partition> truth;
  TmSeries tm;
  if (dataset.synth) {
    auto generated = generate(*dataset.synth);
    tm = std::move(generated.first);
    truth = std::move(generated.second);
  } else {
    tm = load_tm_series(dataset.path, dataset.format, dataset.ingest);
  }
  if (!dataset.ground_truth.empty()) truth = read_partition(dataset.ground_truth);
  if (truth && truth->size() != tm.flow_count()) {
    throw DataError("ground truth labels " + std::to_string(truth->size()) + " flows, trace has " +
                    std::to_string(tm.flow_count()));
  }
  return {std::move(tm), std::move(truth)};
}

namespace {

std::string key_of(std::string_view upstream, const json& inputs) {
  return hex64(fnv1a64(inputs.dump(), fnv1a64(upstream)));
}

// Content hash of a trace file, or of every regular file below a directory
// in path order.
std::string input_hash(const fs::path& path) {
  if (path.empty()) return {};
  if (fs::is_regular_file(path)) return hash_file(path);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a64({});
  for (const auto& f : files) {
    h = fnv1a64(fs::relative(f, path).generic_string(), h);
    h = fnv1a64(read_text(f), h);
  }
  return hex64(h);
}

std::string model_file(int cluster_id) {
  std::ostringstream name;
  name << "models/cluster_" << std::setw(4) << std::setfill('0') << cluster_id << ".bin";
  return name.str();
}

TrainReport report_from_json(const json& c) {
  TrainReport r;
  r.epochs_run = c.at("epochs_run").get<std::size_t>();
  r.train_loss = c.at("train_loss").get<std::vector<double>>();
  r.val_loss = c.at("val_loss").get<std::vector<double>>();
  r.stopped_early = c.at("stopped_early").get<bool>();
  r.best_epoch = c.at("best_epoch").get<std::size_t>();
  r.best_val_loss = c.at("best_val_loss").get<double>();
  r.seed = c.at("seed").get<std::uint64_t>();
  r.init = c.at("init").get<std::string>();
  r.wall_time_seconds = c.value("wall_time_seconds", 0.0);
  return r;
}

json stats_json(const ClusterStats& s) {
  return {{"k", s.k},
          {"min_size", s.min_size},
          {"mean_size", s.mean_size},
          {"max_size", s.max_size},
          {"n_singletons", s.n_singletons},
          {"singleton_pct", s.singleton_pct}};
}

// Rethrows the active exception with the stage name prefixed, keeping its
// category so the exit code is preserved.
[[noreturn]] void rethrow_in_stage(const std::string& stage) {
  const std::string prefix = "stage " + stage + ": ";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const fs::filesystem_error& e) {
    throw DataError(prefix + e.what());
  }
}

class StageRunner {
 public:
  StageRunner(fs::path dir, const PipelineOptions& options) : dir_(std::move(dir)), options_(options) {
    const fs::path manifest = dir_ / "manifest.json";
    if (options_.resume && fs::exists(manifest)) {
      try {
        const json m = json::parse(read_text(manifest));
        for (const auto& s : m.at("stages")) previous_[s.at("name").get<std::string>()] = s;
      } catch (const json::exception&) {
        previous_.clear();  // unreadable manifest: recompute everything
      }
    }
  }

  /// Runs `compute` unless an earlier run recorded the same key and every
  /// listed output still has its recorded hash, in which case `load` runs.
  template <typename Compute, typename Load>
  StageRecord& run(const std::string& name, const std::string& key, Compute&& compute, Load&& load) {
    return run_impl(name, key, compute, &load);
  }

  /// A stage that is always recomputed.
  template <typename Compute>
  StageRecord& run(const std::string& name, const std::string& key, Compute&& compute) {
    return run_impl(name, key, compute, static_cast<void (*)()>(nullptr));
  }

  /// Declares an output of the current stage, written when `text` is given.
  void output(const std::string& file, std::optional<std::string_view> text = std::nullopt) {
    if (text) write_text(dir_ / file, *text);
    written_.push_back(file);
  }

  fs::path path(const std::string& file) const { return dir_ / file; }
  const std::string& current() const { return current_; }
  std::vector<StageRecord>& records() { return records_; }

 private:
  template <typename Compute, typename Load>
  StageRecord& run_impl(const std::string& name, const std::string& key, Compute& compute, Load load) {
    current_ = name;
    StageRecord rec;
    rec.name = name;
    rec.key = key;
    const auto start = std::chrono::steady_clock::now();
    if (load != nullptr && reusable(name, key)) {
      (*load)();
      rec.reused = true;
    } else {
      compute();
    }
    for (const auto& file : written_) rec.outputs[file] = hash_file(dir_ / file);
    written_.clear();
    rec.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (options_.log) {
      *options_.log << "[" << name << "] " << (rec.reused ? "reused" : "done") << " in " << std::fixed
                    << std::setprecision(2) << rec.wall_time_seconds << " s\n";
    }
    records_.push_back(std::move(rec));
    return records_.back();
  }

  bool reusable(const std::string& name, const std::string& key) {
    const auto it = previous_.find(name);
    if (it == previous_.end() || it->second.value("key", "") != key) return false;
    const json& outputs = it->second.at("outputs");
    if (outputs.empty()) return false;
    for (const auto& [file, hash] : outputs.items()) {
      const fs::path p = dir_ / file;
      if (!fs::exists(p) || hash_file(p) != hash.get<std::string>()) return false;
      written_.push_back(file);
    }
    return true;
  }

  fs::path dir_;
  const PipelineOptions& options_;
  std::map<std::string, json> previous_;
  std::vector<std::string> written_;
  std::vector<StageRecord> records_;
  std::string current_ = "setup";
};

json stage_json(const StageRecord& r) {
  return {{"name", r.name},
          {"key", r.key},
          {"reused", r.reused},
          {"wall_time_seconds", r.wall_time_seconds},
          {"outputs", r.outputs}};
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config, const PipelineOptions& options) {
  require_valid(validate_config(config));
  if (config.output_dir.empty()) throw ConfigError("output_dir is required for a pipeline run");
  const fs::path dir = config.output_dir;
  fs::create_directories(dir);

  const std::size_t workers = config.workers > 0 ? config.workers : default_workers();
  const auto started = std::chrono::steady_clock::now();
  StageRunner stages(dir, options);
  PipelineResult result;
  result.run_dir = dir;

  const json cfg = json::parse(config_to_json(config, false));
  const GruConfig gru = config.gru_config();
  const bool naive = config.representation == Representation::Naive;

  auto write_manifest = [&](const std::string& status) {
    json seeds = {{"seed", config.seed}, {"init_stream", 0}, {"shuffle_stream", 1}};
    if (config.partition_seed) seeds["partition_seed"] = *config.partition_seed;
    json m = {{"tool", "tmcf"},
              {"version", std::string(library_version())},
              {"status", status},
              {"config", json::parse(config_to_json(config, true))},
              {"seeds", seeds},
              {"workers", workers},
              {"total_wall_time_seconds",
               std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()},
              {"stages", json::array()}};
    for (const auto& r : stages.records()) m["stages"].push_back(stage_json(r));
    if (status != "ok") m["failed_stage"] = stages.current();
    write_text(dir / "manifest.json", m.dump(2) + "\n");
  };

  try {
    // ingest
    TmSeries tm;
    std::optional<Partition> truth;
    json ingest_inputs = {{"dataset", cfg["dataset"]}, {"input", input_hash(config.dataset.path)}};
    if (!config.dataset.ground_truth.empty()) ingest_inputs["ground_truth"] = hash_file(config.dataset.ground_truth);
    const std::string ingest_key = key_of("ingest", ingest_inputs);
    stages.run(
        "ingest", ingest_key,
        [&] {
          std::tie(tm, truth) = load_dataset(config.dataset);
          std::ostringstream csv;
          write_canonical_csv(csv, tm);
          stages.output("trace.csv", csv.str());
          if (truth) stages.output("ground_truth.json", partition_to_json(*truth));
        },
        [&] {
          tm = load_tm_series(stages.path("trace.csv"), TraceFormat::Csv);
          if (fs::exists(stages.path("ground_truth.json"))) truth = read_partition(stages.path("ground_truth.json"));
        });
    result.ground_truth = truth;

    // prepare
    PreparedTrace trace;
    const std::string prepare_key =
        key_of(ingest_key, {{"window_length", cfg["window_length"]},
                            {"train_frac", cfg["train_frac"]},
                            {"val_frac", cfg["val_frac"]},
                            {"normalize", cfg["normalize"]}});
    stages.run(
        "prepare", prepare_key,
        [&] {
          trace = prepare_trace(tm, config.window);
          std::ostringstream scale;
          scale << "flow,min,max,constant\n";
          for (std::size_t m = 0; m < trace.scale.size(); ++m) {
            scale << m << ',' << format_double(trace.scale.min[m]) << ',' << format_double(trace.scale.max[m]) << ','
                  << (trace.scale.is_constant(m) ? 1 : 0) << '\n';
          }
          stages.output("scale.csv", scale.str());
        });
    const std::size_t m_count = trace.normalized.flow_count();

    // represent
    std::string upstream = prepare_key;
    std::optional<DissimilarityMatrix> dissimilarity;
    const ReprOptions repr = config.repr_options();
    if (!naive) {
      const std::string represent_key =
          key_of(prepare_key, {{"representation", cfg["representation"]},
                               {"bins", cfg["bins"]},
                               {"lags", cfg["lags"]},
                               {"fs", cfg["fs"]},
                               {"welch", cfg["welch"]},
                               {"psd_unit_mass", cfg["psd_unit_mass"]},
                               {"metric", cfg["metric"]}});
      stages.run(
          "represent", represent_key,
          [&] {
            const ReprMatrix features = represent(trace.normalized, trace.splits.train, trace.interval_seconds(), repr);
            dissimilarity = pairwise_dissimilarity(features, config.effective_metric());
            write_features_csv(stages.path("features.csv"), features);
            stages.output("features.csv");
            write_dissimilarity_csv(stages.path("dissimilarity.csv"), *dissimilarity);
            stages.output("dissimilarity.csv");
            json meta = {{"representation", cfg["representation"]},
                         {"metric", cfg["metric"]},
                         {"range", {trace.splits.train.begin, trace.splits.train.end}},
                         {"axis_length", features.axis.size()}};
            std::vector<std::size_t> degenerate;
            for (std::size_t m = 0; m < features.degenerate.size(); ++m) {
              if (features.degenerate[m]) degenerate.push_back(m);
            }
            meta["degenerate_flows"] = degenerate;
            if (repr.kind == Representation::Histogram) meta["bins"] = repr.bins;
            if (repr.kind == Representation::Acf) {
              std::vector<std::size_t> lags;
              for (const double a : features.axis) lags.push_back(static_cast<std::size_t>(a));
              meta["lags"] = lags;
            }
            if (repr.kind == Representation::Psd) {
              meta["fs"] = repr.fs > 0.0 ? repr.fs : samples_per_hour(trace.interval_seconds());
              meta["welch"] = {{"segment_length", std::min(repr.welch.segment_length, trace.splits.train.size())},
                               {"overlap", repr.welch.overlap},
                               {"window", "hann (periodic)"},
                               {"detrend", "segment mean"},
                               {"scaling", "one-sided density"},
                               {"unit_mass", repr.psd_unit_mass}};
            }
            stages.output("represent.json", meta.dump(2) + "\n");
          },
          [&] {
            dissimilarity = read_dissimilarity_csv(stages.path("dissimilarity.csv"));
          });
      upstream = represent_key;
    }

    // sweep
    std::size_t chosen_k = config.k.value_or(0);
    if (!config.k) {
      SweepOptions sw;
      sw.repr = repr;
      sw.linkage = config.effective_linkage();
      sw.metric = config.effective_metric();
      sw.k_grid = config.k_grid_auto ? default_k_grid(m_count, config.k_step) : config.k_grid;
      sw.repetitions = config.repetitions;
      sw.base = gru;
      sw.partition_seed = config.partition_seed.value_or(0);
      sw.workers = workers;
      const std::string sweep_key =
          key_of(upstream, {{"k_grid", sw.k_grid},
                            {"repetitions", sw.repetitions},
                            {"linkage", cfg.value("linkage", json())},
                            {"partition_seed", cfg.value("partition_seed", json())},
                            {"gru", {cfg["hidden_size"], cfg["epochs"], cfg["learning_rate"], cfg["batch_size"],
                                     cfg["patience"], cfg["min_delta"], cfg["seed"]}}});
      SweepCurve curve;
      stages.run(
          "sweep", sweep_key,
          [&] {
            curve = k_sweep(trace, sw).curve;
            write_sweep_csv(stages.path("sweep.csv"), curve);
            stages.output("sweep.csv");
          },
          [&] { curve = read_sweep_csv(stages.path("sweep.csv")); });
      const KneeResult knee = kneedle(curve);
      chosen_k = knee.k;
      result.sweep = curve;
      result.knee = knee;
      upstream = sweep_key;
    }
    if (chosen_k < 1 || chosen_k > m_count) {
      throw ConfigError("k = " + std::to_string(chosen_k) + " outside [1, " + std::to_string(m_count) + "]");
    }

    // cluster
    Partition partition;
    const std::string cluster_key =
        key_of(upstream, {{"k", chosen_k},
                          {"linkage", cfg.value("linkage", json())},
                          {"partition_seed", cfg.value("partition_seed", json())}});
    stages.run(
        "cluster", cluster_key,
        [&] {
          if (naive) {
            partition = naive_partition(m_count, chosen_k, *config.partition_seed);
          } else {
            const Dendrogram dendrogram = hac(*dissimilarity, config.effective_linkage());
            write_dendrogram_csv(stages.path("dendrogram.csv"), dendrogram);
            stages.output("dendrogram.csv");
            partition = cut(dendrogram, chosen_k);
            partition.method = std::string(to_string(config.representation)) + "/" +
                               std::string(to_string(config.effective_linkage()));
          }
          write_partition(stages.path("partition.json"), partition);
          stages.output("partition.json");
        },
        [&] { partition = read_partition(stages.path("partition.json")); });
    result.partition = partition;

    // train
    std::vector<ClusterModel> models;
    const std::string train_key =
        key_of(cluster_key, {{"gru", {cfg["profile"], cfg["hidden_size"], cfg["epochs"], cfg["learning_rate"],
                                      cfg["batch_size"], cfg["patience"], cfg["min_delta"], cfg["seed"]}}});
    stages.run(
        "train", train_key,
        [&] {
          models = train_partitioned(partition, trace.normalized, gru, trace.splits, trace.window_length, workers);
          for (const auto& cm : models) {
            save_model(stages.path(model_file(cm.cluster_id)), cm, gru.profile);
            stages.output(model_file(cm.cluster_id));
          }
          stages.output("train_report.json", train_report_json(models, true));
        },
        [&] {
          const json reports = json::parse(read_text(stages.path("train_report.json")));
          for (const auto& c : reports.at("clusters")) {
            LoadedModel lm = load_model(stages.path(model_file(c.at("cluster").get<int>())));
            lm.model.report = report_from_json(c);
            models.push_back(std::move(lm.model));
          }
        });

    // predict
    Forecast forecast;
    stages.run(
        "predict", key_of(train_key, json::object()),
        [&] {
          forecast = predict_tm(models, partition, trace.normalized, trace.splits.test, trace.window_length,
                                trace.scale, trace.interval_seconds());
          TmSeries out = forecast.predicted;
          out.timestamps().resize(out.steps());
          for (std::size_t s = 0; s < out.steps(); ++s) {
            out.timestamps()[s] = static_cast<std::int64_t>(forecast.first_step + s);
          }
          std::ostringstream csv;
          write_canonical_csv(csv, out);
          stages.output("predictions.csv", csv.str());
        });

    // evaluate
    stages.run(
        "evaluate", key_of(train_key, {{"units", cfg["units"]}}),
        [&] {
          result.errors = evaluate_forecast(trace, forecast, config.units);
          write_per_flow_csv(stages.path("per_flow_rmse.csv"), trace.normalized.n_nodes(),
                             result.errors.per_flow_normalized, result.errors.per_flow_physical);
          stages.output("per_flow_rmse.csv");

          std::size_t constant_flows = 0;
          for (std::size_t m = 0; m < m_count; ++m) constant_flows += trace.scale.is_constant(m) ? 1 : 0;
          json report = {
              {"version", std::string(library_version())},
              {"config", cfg},
              {"metadata",
               {{"normalization", "per-flow min-max, statistics from the training region"},
                {"nmi_normalization", "arithmetic mean of entropies"},
                {"rmse_aggregation", "pooled squared errors over test samples and flows"},
                {"forecast_horizon", 1},
                {"gru_init", models.empty() ? std::string() : models.front().report.init},
                {"optimizer", {{"name", "adam"}, {"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
                {"cluster_seed_rule", "mix_seed(seed, cluster_index + 1)"}}},
              {"dataset",
               {{"n_nodes", trace.normalized.n_nodes()},
                {"flows", m_count},
                {"steps", trace.tm.steps()},
                {"interval_seconds", trace.interval_seconds()},
                {"constant_flows", constant_flows},
                {"splits",
                 {{"train", {trace.splits.train.begin, trace.splits.train.end}},
                  {"validation", {trace.splits.validation.begin, trace.splits.validation.end}},
                  {"test", {trace.splits.test.begin, trace.splits.test.end}}}}}},
              {"partition",
               {{"k", partition.k},
                {"method", partition.method},
                {"labels", partition.labels},
                {"stats", stats_json(cluster_stats(partition))}}},
              {"rmse_normalized", result.errors.rmse_normalized},
              {"rmse_physical_mbps", result.errors.rmse_physical},
              {"units", cfg["units"]},
              {"test_samples", result.errors.test_samples},
              {"per_flow_rmse",
               {{"normalized", result.errors.per_flow_normalized}, {"mbps", result.errors.per_flow_physical}}}};
          if (partition.seed) report["partition"]["seed"] = *partition.seed;
          if (truth) {
            report["ground_truth"] = {{"k", truth->k},
                                      {"ari", ari(partition, *truth)},
                                      {"nmi", nmi(partition, *truth)},
                                      {"matched_k", truth->k == partition.k}};
          }
          if (result.sweep) {
            report["sweep"] = {{"k_values", result.sweep->k_values},
                               {"mean_rmse", result.sweep->mean_rmse},
                               {"rmse_std", result.sweep->rmse_std},
                               {"repetitions", result.sweep->repetitions},
                               {"knee_k", result.knee->k},
                               {"knee_found", result.knee->knee_found}};
          }
          json training = json::array();
          for (const auto& cm : models) {
            training.push_back({{"cluster", cm.cluster_id},
                                {"flows", cm.flows.size()},
                                {"epochs_run", cm.report.epochs_run},
                                {"best_epoch", cm.report.best_epoch},
                                {"best_val_loss", cm.report.best_val_loss},
                                {"stopped_early", cm.report.stopped_early}});
          }
          report["training"] = training;
          result.report_json = report.dump(2) + "\n";
          stages.output("report.json", result.report_json);
        });
  } catch (...) {
    const std::string stage = stages.current();
    try {
      write_manifest("failed");
    } catch (...) {
      // The original failure is more useful than a manifest write error.
    }
    rethrow_in_stage(stage);
  }

  result.stages = stages.records();
  write_manifest("ok");
  return result;
}

}  // namespace tmcf
