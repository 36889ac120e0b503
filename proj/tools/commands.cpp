#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tmcf/artifacts.hpp"
#include "tmcf/config.hpp"
#include "tmcf/errors.hpp"
#include "tmcf/model_io.hpp"
#include "tmcf/parallel.hpp"
#include "tmcf/pipeline.hpp"
#include "tmcf/sweep.hpp"
#include "tmcf/synth.hpp"
#include "tmcf/trace_io.hpp"

namespace tmcf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flags shared by every command that reads a trace and splits it.
struct TraceFlags {
  std::string trace;
  std::string format = "csv";
  bool zero_fill = false;
  std::uint32_t interval = 300;
  std::size_t window_length = 11;
  double train_frac = 0.8;
  double val_frac = 0.1;

  void add(CLI::App* cmd) {
    cmd->add_option("--trace", trace, "Trace file or archive directory")->required();
    cmd->add_option("--format", format, "csv, abilene or geant")->capture_default_str();
    cmd->add_flag("--zero-fill", zero_fill, "Treat missing cells as 0 instead of failing");
    cmd->add_option("--interval", interval, "Sampling period when a CSV trace does not state it")
        ->capture_default_str();
    cmd->add_option("--window-length", window_length, "Window length L (inputs + target)")->capture_default_str();
    cmd->add_option("--train-frac", train_frac)->capture_default_str();
    cmd->add_option("--val-frac", val_frac, "Validation share of the training region")->capture_default_str();
  }

  IngestOptions ingest() const {
    IngestOptions o;
    o.zero_fill_missing = zero_fill;
    o.interval_seconds = interval;
    return o;
  }

  TmSeries load() const { return load_tm_series(trace, parse_trace_format(format), ingest()); }

  PreparedTrace prepare() const {
    WindowOptions w;
    w.window_length = window_length;
    w.train_frac = train_frac;
    w.val_frac = val_frac;
    return prepare_trace(load(), w);
  }
};

struct ReprFlags {
  std::string representation = "histogram";
  std::size_t bins = 50;
  std::vector<std::size_t> lags;
  double fs = 0.0;
  std::size_t segment = 256;
  double overlap = 0.5;
  bool raw_psd = false;
  std::string metric;
  std::string linkage;

  void add(CLI::App* cmd) {
    cmd->add_option("--representation", representation, "histogram, acf, psd or naive")->capture_default_str();
    cmd->add_option("--bins", bins, "Histogram bins")->capture_default_str();
    cmd->add_option("--lags", lags, "ACF lags in steps (default: schedule from the interval)")->delimiter(',');
    cmd->add_option("--fs", fs, "PSD sampling frequency in samples/hour (default: from the interval)");
    cmd->add_option("--segment", segment, "Welch segment length")->capture_default_str();
    cmd->add_option("--overlap", overlap, "Welch segment overlap")->capture_default_str();
    cmd->add_flag("--raw-psd", raw_psd, "Do not rescale PSD vectors to unit mass");
    cmd->add_option("--metric", metric, "jsd or euclidean (default: per representation)");
  }

  ReprOptions options() const {
    ReprOptions o;
    o.kind = parse_representation(representation);
    o.bins = bins;
    o.lags = lags;
    o.fs = fs;
    o.welch.segment_length = segment;
    o.welch.overlap = overlap;
    o.psd_unit_mass = !raw_psd;
    return o;
  }

  Metric effective_metric() const {
    const Representation r = parse_representation(representation);
    const Metric m = metric.empty() ? default_metric(r) : parse_metric(metric);
    if (m == Metric::Jsd && r != Representation::Histogram) {
      throw ConfigError("jsd is defined on histograms only, not " + representation);
    }
    return m;
  }

  Linkage effective_linkage() const {
    return linkage.empty() ? default_linkage(parse_representation(representation)) : parse_linkage(linkage);
  }
};

struct GruFlags {
  std::string profile = "desk";
  std::uint64_t seed = 0;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> epochs;
  std::size_t workers = default_workers();

  void add(CLI::App* cmd) {
    cmd->add_option("--profile", profile, "paper or desk")->capture_default_str();
    cmd->add_option("--seed", seed, "Predictor seed")->capture_default_str();
    cmd->add_option("--hidden", hidden, "Override the hidden size");
    cmd->add_option("--epochs", epochs, "Override the epoch budget");
    cmd->add_option("--workers", workers, "Worker threads (default: $TMCF_WORKERS or 1)")->capture_default_str();
  }

  GruConfig config() const {
    GruConfig c = GruConfig::from_profile(profile);
    if (hidden) c.hidden_size = *hidden;
    if (epochs) c.epochs = *epochs;
    c.seed = seed;
    c.validate();
    return c;
  }
};

void write_trace(const fs::path& path, const TmSeries& tm) {
  std::ostringstream csv;
  write_canonical_csv(csv, tm);
  write_text(path, csv.str());
}

std::string model_file(int cluster_id) {
  char name[32];
  std::snprintf(name, sizeof name, "cluster_%04d.bin", cluster_id);
  return name;
}

// name=path pairs from repeated --partition / --errors flags.
std::vector<std::pair<std::string, std::string>> named_paths(const std::vector<std::string>& items,
                                                             const char* flag) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw ConfigError(std::string(flag) + " expects name=path, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

void print_findings(const std::vector<Finding>& findings) {
  for (const auto& f : findings) {
    std::cerr << (f.severity == Finding::Severity::Error ? "error: " : "warning: ") << f.field << ": " << f.message
              << '\n';
  }
}

}  // namespace

std::function<void()> register_commands(CLI::App& app) {
  auto selected = std::make_shared<std::function<void()>>();

  // synth
  {
    struct Opts {
      std::string spec;
      std::size_t n_nodes = 4;
      std::size_t steps = 2048;
      std::uint32_t interval = 300;
      std::vector<std::string> groups;
      std::uint64_t seed = 0;
      std::string out = "trace.csv";
      std::string truth = "ground_truth.json";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("synth", "Generate a synthetic trace with planted flow groups");
    cmd->add_option("--spec", o->spec, "JSON spec (same schema as dataset.synth in a run config)");
    cmd->add_option("--n-nodes", o->n_nodes)->capture_default_str();
    cmd->add_option("--steps", o->steps)->capture_default_str();
    cmd->add_option("--interval", o->interval)->capture_default_str();
    cmd->add_option("--group", o->groups, "count:period:amplitude:noise_std[:shape], repeatable");
    cmd->add_option("--seed", o->seed)->capture_default_str();
    cmd->add_option("--out", o->out, "Trace CSV")->capture_default_str();
    cmd->add_option("--truth", o->truth, "Ground-truth partition JSON")->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        SynthSpec spec;
        if (!o->spec.empty()) {
          spec = synth_spec_from_json(read_text(o->spec));
        } else {
          spec.n_nodes = o->n_nodes;
          spec.steps = o->steps;
          spec.interval_seconds = o->interval;
          spec.seed = o->seed;
          for (const auto& g : o->groups) {
            std::vector<std::string> parts;
            std::stringstream ss(g);
            for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
            if (parts.size() < 4 || parts.size() > 5) throw ConfigError("bad --group '" + g + "'");
            FlowGroup fg;
            try {
              fg.flow_count = std::stoul(parts[0]);
              fg.period_steps = std::stoul(parts[1]);
              fg.amplitude = std::stod(parts[2]);
              fg.noise_std = std::stod(parts[3]);
            } catch (const std::exception&) {
              throw ConfigError("bad --group '" + g + "'");
            }
            if (parts.size() == 5) fg.shape = parse_wave_shape(parts[4]);
            spec.groups.push_back(fg);
          }
        }
        const auto [tm, truth] = generate(spec);
        write_trace(o->out, tm);
        write_partition(o->truth, truth);
        std::cout << "wrote " << o->out << " (N=" << tm.n_nodes() << ", T=" << tm.steps() << ") and " << o->truth
                  << " (K=" << truth.k << ")\n";
      };
    });
  }

  // ingest
  {
    struct Opts {
      std::string input;
      std::string format = "csv";
      bool zero_fill = false;
      std::uint32_t interval = 300;
      std::string out = "trace.csv";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("ingest", "Convert a trace to canonical CSV and validate it");
    cmd->add_option("--input", o->input, "Trace file or archive directory")->required();
    cmd->add_option("--format", o->format, "csv, abilene or geant")->capture_default_str();
    cmd->add_flag("--zero-fill", o->zero_fill, "Treat missing cells as 0 instead of failing");
    cmd->add_option("--interval", o->interval, "Sampling period for CSV input without a directive")
        ->capture_default_str();
    cmd->add_option("--out", o->out)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        IngestOptions opt;
        opt.zero_fill_missing = o->zero_fill;
        opt.interval_seconds = o->interval;
        const TmSeries tm = load_tm_series(o->input, parse_trace_format(o->format), opt);
        write_trace(o->out, tm);
        std::cout << "wrote " << o->out << " (N=" << tm.n_nodes() << ", T=" << tm.steps()
                  << ", interval=" << tm.interval_seconds() << " s)\n";
      };
    });
  }

  // represent
  {
    struct Opts {
      TraceFlags trace;
      ReprFlags repr;
      std::string out_dir = ".";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("represent", "Compute per-flow features and the dissimilarity matrix");
    o->trace.add(cmd);
    o->repr.add(cmd);
    cmd->add_option("--out-dir", o->out_dir)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        const ReprOptions ro = o->repr.options();
        if (ro.kind == Representation::Naive) throw ConfigError("the naive baseline has no features");
        const Metric metric = o->repr.effective_metric();
        const PreparedTrace trace = o->trace.prepare();
        const ReprMatrix features = represent(trace.normalized, trace.splits.train, trace.interval_seconds(), ro);
        const DissimilarityMatrix d = pairwise_dissimilarity(features, metric);
        const fs::path dir = o->out_dir;
        write_features_csv(dir / "features.csv", features);
        write_dissimilarity_csv(dir / "dissimilarity.csv", d);
        std::vector<std::size_t> degenerate;
        for (std::size_t m = 0; m < features.degenerate.size(); ++m) {
          if (features.degenerate[m]) degenerate.push_back(m);
        }
        json meta = {{"representation", std::string(to_string(ro.kind))},
                     {"metric", std::string(to_string(metric))},
                     {"range", {trace.splits.train.begin, trace.splits.train.end}},
                     {"degenerate_flows", degenerate}};
        if (ro.kind == Representation::Histogram) meta["bins"] = ro.bins;
        if (ro.kind == Representation::Acf) meta["lags"] = features.axis;
        if (ro.kind == Representation::Psd) {
          meta["fs"] = ro.fs > 0.0 ? ro.fs : samples_per_hour(trace.interval_seconds());
          meta["welch"] = {{"segment_length", std::min(ro.welch.segment_length, trace.splits.train.size())},
                           {"overlap", ro.welch.overlap},
                           {"window", "hann (periodic)"},
                           {"detrend", "segment mean"},
                           {"scaling", "one-sided density"},
                           {"unit_mass", ro.psd_unit_mass}};
        }
        write_text(dir / "represent.json", meta.dump(2) + "\n");
        std::cout << "wrote features.csv, dissimilarity.csv and represent.json to " << dir.string() << '\n';
      };
    });
  }

  // cluster
  {
    struct Opts {
      std::string dissimilarity;
      std::string linkage = "complete";
      std::string method = "hac";
      std::size_t k = 0;
      std::optional<std::uint64_t> seed;
      std::optional<std::size_t> flows;
      std::string out = "partition.json";
      std::string dendrogram = "dendrogram.csv";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("cluster", "Cut an agglomerative dendrogram or draw a naive partition");
    cmd->add_option("--dissimilarity", o->dissimilarity, "Dissimilarity CSV (required for hac)");
    cmd->add_option("--linkage", o->linkage, "complete or average")->capture_default_str();
    cmd->add_option("--method", o->method, "hac or naive")->capture_default_str();
    cmd->add_option("--k", o->k, "Number of clusters")->required();
    cmd->add_option("--seed", o->seed, "Partition seed (naive only)");
    cmd->add_option("--flows", o->flows, "Flow count for naive when no dissimilarity file is given");
    cmd->add_option("--out", o->out)->capture_default_str();
    cmd->add_option("--dendrogram", o->dendrogram)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        Partition p;
        if (o->method == "naive") {
          if (!o->seed) throw ConfigError("--method naive requires --seed");
          std::size_t m = o->flows.value_or(0);
          if (!o->dissimilarity.empty()) m = read_dissimilarity_csv(o->dissimilarity).size();
          if (m == 0) throw ConfigError("--method naive needs --flows or --dissimilarity");
          p = naive_partition(m, o->k, *o->seed);
        } else if (o->method == "hac") {
          if (o->dissimilarity.empty()) throw ConfigError("--method hac requires --dissimilarity");
          const DissimilarityMatrix d = read_dissimilarity_csv(o->dissimilarity);
          const Linkage linkage = parse_linkage(o->linkage);
          const Dendrogram dendrogram = hac(d, linkage);
          write_dendrogram_csv(o->dendrogram, dendrogram);
          p = cut(dendrogram, o->k);
          p.method = "hac/" + std::string(to_string(linkage));
        } else {
          throw ConfigError("unknown --method '" + o->method + "' (expected hac or naive)");
        }
        write_partition(o->out, p);
        const ClusterStats s = cluster_stats(p);
        std::cout << "K=" << s.k << " sizes min " << s.min_size << " mean " << s.mean_size << " max " << s.max_size
                  << ", singletons " << s.n_singletons << '\n';
      };
    });
  }

  // train
  {
    struct Opts {
      TraceFlags trace;
      GruFlags gru;
      std::string partition;
      std::string out_dir = ".";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("train", "Train one forecaster per cluster");
    o->trace.add(cmd);
    o->gru.add(cmd);
    cmd->add_option("--partition", o->partition, "Partition JSON")->required();
    cmd->add_option("--out-dir", o->out_dir)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        const GruConfig cfg = o->gru.config();
        const PreparedTrace trace = o->trace.prepare();
        const Partition p = read_partition(o->partition);
        const auto models =
            train_partitioned(p, trace.normalized, cfg, trace.splits, trace.window_length, o->gru.workers);
        const fs::path dir = o->out_dir;
        for (const auto& cm : models) save_model(dir / "models" / model_file(cm.cluster_id), cm, cfg.profile);
        write_text(dir / "train_report.json", train_report_json(models, true));
        std::cout << "trained " << models.size() << " model(s) into " << (dir / "models").string() << '\n';
      };
    });
  }

  // evaluate
  {
    struct Opts {
      TraceFlags trace;
      std::string partition;
      std::string models;
      std::string units = "bytes";
      std::string truth;
      std::string out_dir = ".";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("evaluate", "Forecast the test region and report errors");
    o->trace.add(cmd);
    cmd->add_option("--partition", o->partition, "Partition JSON")->required();
    cmd->add_option("--models", o->models, "Directory of model files")->required();
    cmd->add_option("--units", o->units, "Trace units: bytes, bits or mbps")->capture_default_str();
    cmd->add_option("--truth", o->truth, "Optional ground-truth partition for ARI/NMI");
    cmd->add_option("--out-dir", o->out_dir)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        const PreparedTrace trace = o->trace.prepare();
        const Partition p = read_partition(o->partition);
        std::vector<ClusterModel> models;
        for (int c = 1; c <= p.k; ++c) models.push_back(load_model(fs::path(o->models) / model_file(c)).model);
        const Forecast fc = predict_tm(models, p, trace.normalized, trace.splits.test, trace.window_length,
                                       trace.scale, trace.interval_seconds());
        const TrafficUnits units = parse_units(o->units);
        const ForecastErrors e = evaluate_forecast(trace, fc, units);
        const fs::path dir = o->out_dir;
        write_per_flow_csv(dir / "per_flow_rmse.csv", trace.normalized.n_nodes(), e.per_flow_normalized,
                           e.per_flow_physical);
        const ClusterStats s = cluster_stats(p);
        json report = {{"rmse_normalized", e.rmse_normalized},
                       {"rmse_physical_mbps", e.rmse_physical},
                       {"units", o->units},
                       {"test_samples", e.test_samples},
                       {"per_flow_rmse", {{"normalized", e.per_flow_normalized}, {"mbps", e.per_flow_physical}}},
                       {"partition",
                        {{"k", p.k},
                         {"method", p.method},
                         {"stats",
                          {{"min_size", s.min_size},
                           {"mean_size", s.mean_size},
                           {"max_size", s.max_size},
                           {"n_singletons", s.n_singletons},
                           {"singleton_pct", s.singleton_pct}}}}},
                       {"metadata",
                        {{"normalization", "per-flow min-max, statistics from the training region"},
                         {"rmse_aggregation", "pooled squared errors over test samples and flows"},
                         {"nmi_normalization", "arithmetic mean of entropies"}}}};
        if (!o->truth.empty()) {
          const Partition truth = read_partition(o->truth);
          report["ground_truth"] = {{"ari", ari(p, truth)}, {"nmi", nmi(p, truth)}};
        }
        write_text(dir / "report.json", report.dump(2) + "\n");
        std::cout << "RMSE normalized " << e.rmse_normalized << ", physical " << e.rmse_physical << " Mbps\n";
      };
    });
  }

  // sweep
  {
    struct Opts {
      TraceFlags trace;
      ReprFlags repr;
      GruFlags gru;
      std::vector<std::size_t> grid;
      std::size_t step = 10;
      std::size_t repetitions = 5;
      std::uint64_t partition_seed = 0;
      std::string out = "sweep.csv";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("sweep", "RMSE against K over a grid, with knee selection");
    o->trace.add(cmd);
    o->repr.add(cmd);
    o->gru.add(cmd);
    cmd->add_option("--linkage", o->repr.linkage, "complete or average (default: per representation)");
    cmd->add_option("--k-grid", o->grid, "Comma-separated K values (default: 1, 1+step, ..., M)")->delimiter(',');
    cmd->add_option("--k-step", o->step)->capture_default_str();
    cmd->add_option("--repetitions", o->repetitions)->capture_default_str();
    cmd->add_option("--partition-seed", o->partition_seed, "Base seed for naive partitions")->capture_default_str();
    cmd->add_option("--out", o->out)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        const PreparedTrace trace = o->trace.prepare();
        SweepOptions sw;
        sw.repr = o->repr.options();
        if (sw.repr.kind != Representation::Naive) {
          sw.metric = o->repr.effective_metric();
          sw.linkage = o->repr.effective_linkage();
        }
        sw.k_grid = o->grid.empty() ? default_k_grid(trace.normalized.flow_count(), o->step) : o->grid;
        sw.repetitions = o->repetitions;
        sw.base = o->gru.config();
        sw.partition_seed = o->partition_seed;
        sw.workers = o->gru.workers;
        const SweepResult res = k_sweep(trace, sw);
        write_sweep_csv(o->out, res.curve);
        std::cout << "wrote " << o->out << '\n';
        if (res.curve.k_values.size() >= 3) {
          const KneeResult knee = kneedle(res.curve);
          std::cout << (knee.knee_found ? "knee at K=" : "no knee; lowest RMSE at K=") << knee.k << '\n';
        }
      };
    });
  }

  // run
  {
    struct Opts {
      std::string config;
      std::optional<std::string> output_dir;
      std::optional<std::size_t> workers;
      std::optional<std::uint64_t> seed;
      std::optional<std::uint64_t> partition_seed;
      std::optional<std::string> profile;
      std::optional<std::string> representation;
      std::optional<std::size_t> k;
      bool resume = false;
      bool validate_only = false;
      bool quiet = false;
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("run", "Run the full pipeline from a JSON config (or a run manifest)");
    cmd->add_option("--config", o->config, "Config JSON or manifest.json of an earlier run")->required();
    cmd->add_option("--output-dir", o->output_dir);
    cmd->add_option("--workers", o->workers);
    cmd->add_option("--seed", o->seed);
    cmd->add_option("--partition-seed", o->partition_seed);
    cmd->add_option("--profile", o->profile);
    cmd->add_option("--representation", o->representation);
    cmd->add_option("--k", o->k, "Fixed K (replaces any sweep grid)");
    cmd->add_flag("--resume", o->resume, "Reuse stages whose inputs are unchanged");
    cmd->add_flag("--validate-only", o->validate_only, "Check the config and exit");
    cmd->add_flag("--quiet", o->quiet, "No per-stage progress lines");
    cmd->callback([o, selected] {
      *selected = [o] {
        RunConfig c = load_run_config(o->config);
        if (o->output_dir) c.output_dir = *o->output_dir;
        if (o->workers) c.workers = *o->workers;
        if (o->seed) c.seed = *o->seed;
        if (o->partition_seed) c.partition_seed = *o->partition_seed;
        if (o->profile) c.profile = *o->profile;
        if (o->representation) c.representation = parse_representation(*o->representation);
        if (o->k) {
          c.k = *o->k;
          c.k_grid.clear();
          c.k_grid_auto = false;
        }
        if (c.workers == 0) c.workers = default_workers();
        const auto findings = validate_config(c);
        print_findings(findings);
        require_valid(findings);
        if (o->validate_only) {
          std::cout << "config is valid\n";
          return;
        }
        PipelineOptions po;
        po.resume = o->resume;
        po.log = o->quiet ? nullptr : &std::cerr;
        const PipelineResult r = run_pipeline(c, po);
        std::cout << "run directory " << r.run_dir.string() << ": K=" << r.partition.k << ", RMSE normalized "
                  << r.errors.rmse_normalized << ", physical " << r.errors.rmse_physical << " Mbps";
        if (r.ground_truth) std::cout << ", ARI vs ground truth " << ari(r.partition, *r.ground_truth);
        std::cout << '\n';
      };
    });
  }

  // compare
  {
    struct Opts {
      std::vector<std::string> partitions;
      std::vector<std::string> errors;
      std::string column = "rmse_mbps";
      std::string out_dir = ".";
    };
    auto o = std::make_shared<Opts>();
    auto* cmd = app.add_subcommand("compare", "Cross-method agreement, error correlation and cluster statistics");
    cmd->add_option("--partition", o->partitions, "name=partition.json, repeatable");
    cmd->add_option("--errors", o->errors, "name=per_flow_rmse.csv, repeatable");
    cmd->add_option("--column", o->column, "Per-flow error column: rmse_mbps or rmse_normalized")
        ->capture_default_str();
    cmd->add_option("--out-dir", o->out_dir)->capture_default_str();
    cmd->callback([o, selected] {
      *selected = [o] {
        const fs::path dir = o->out_dir;
        const auto parts = named_paths(o->partitions, "--partition");
        const auto errs = named_paths(o->errors, "--errors");
        if (parts.empty() && errs.empty()) throw ConfigError("compare needs --partition or --errors inputs");

        std::vector<std::pair<std::string, Partition>> ps;
        for (const auto& [name, path] : parts) ps.emplace_back(name, read_partition(path));
        if (!ps.empty()) {
          std::ostringstream agree, stats;
          agree << "a,b,k_a,k_b,k_mode,ari,nmi\n";
          for (std::size_t i = 0; i < ps.size(); ++i) {
            for (std::size_t j = i + 1; j < ps.size(); ++j) {
              const Partition& a = ps[i].second;
              const Partition& b = ps[j].second;
              agree << ps[i].first << ',' << ps[j].first << ',' << a.k << ',' << b.k << ','
                    << (a.k == b.k ? "matched" : "method_specific") << ',' << format_double(ari(a, b)) << ','
                    << format_double(nmi(a, b)) << '\n';
            }
          }
          stats << "method,k,min_size,mean_size,max_size,n_singletons,singleton_pct\n";
          for (const auto& [name, p] : ps) {
            const ClusterStats s = cluster_stats(p);
            stats << name << ',' << s.k << ',' << s.min_size << ',' << format_double(s.mean_size) << ','
                  << s.max_size << ',' << s.n_singletons << ',' << format_double(s.singleton_pct) << '\n';
          }
          write_text(dir / "agreement.csv", agree.str());
          write_text(dir / "cluster_stats.csv", stats.str());
        }

        if (!errs.empty()) {
          std::vector<std::pair<std::string, std::vector<double>>> es;
          for (const auto& [name, path] : errs) es.emplace_back(name, read_per_flow_csv(path, o->column));
          std::ostringstream corr;
          corr << "a,b,pearson\n";
          for (std::size_t i = 0; i < es.size(); ++i) {
            for (std::size_t j = i + 1; j < es.size(); ++j) {
              const auto r = error_correlation(es[i].second, es[j].second);
              corr << es[i].first << ',' << es[j].first << ',' << (r ? format_double(*r) : "undefined") << '\n';
            }
          }
          write_text(dir / "error_correlation.csv", corr.str());
        }
        std::cout << "wrote comparison tables to " << dir.string() << '\n';
      };
    });
  }

  return [selected] {
    if (!*selected) throw ConfigError("no subcommand selected");
    (*selected)();
  };
}

}  // namespace tmcf::cli
