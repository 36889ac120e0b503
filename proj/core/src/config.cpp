#include "tmcf/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tmcf/errors.hpp"

namespace tmcf {

using nlohmann::json;

ReprOptions RunConfig::repr_options() const {
  ReprOptions o;
  o.kind = representation;
  o.bins = bins;
  o.lags = lags;
  o.fs = fs;
  o.welch = welch;
  o.psd_unit_mass = psd_unit_mass;
  return o;
}

GruConfig RunConfig::gru_config() const {
  GruConfig c = GruConfig::from_profile(profile);
  if (hidden_size) c.hidden_size = *hidden_size;
  if (epochs) c.epochs = *epochs;
  if (learning_rate) c.learning_rate = *learning_rate;
  if (batch_size) c.batch_size = *batch_size;
  if (patience) c.patience = *patience;
  if (min_delta) c.min_delta = *min_delta;
  c.seed = seed;
  return c;
}

Linkage RunConfig::effective_linkage() const {
  if (linkage) return *linkage;
  return representation == Representation::Histogram ? Linkage::Complete : Linkage::Average;
}

Metric RunConfig::effective_metric() const { return metric.value_or(default_metric(representation)); }

namespace {

void add(std::vector<Finding>& out, Finding::Severity s, std::string field, std::string message) {
  out.push_back(Finding{s, std::move(field), std::move(message)});
}

// Rough trace size (flows, steps) without fully parsing the file.
std::optional<std::pair<std::size_t, std::size_t>> estimate_size(const DatasetConfig& d) {
  if (d.synth) return std::pair{d.synth->n_nodes * d.synth->n_nodes, d.synth->steps};
  std::error_code ec;
  if (d.format == TraceFormat::Abilene) return std::pair{std::size_t{144}, std::size_t{0}};
  if (d.format == TraceFormat::Geant) return std::pair{std::size_t{529}, std::size_t{0}};
  if (!std::filesystem::is_regular_file(d.path, ec)) return std::nullopt;
  std::ifstream in(d.path);
  std::string line;
  std::size_t rows = 0, columns = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (columns == 0) {
      columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
      continue;
    }
    ++rows;
  }
  return std::pair{columns, rows};
}

}  // namespace

std::vector<Finding> validate_config(const RunConfig& c) {
  using S = Finding::Severity;
  std::vector<Finding> f;
  std::error_code ec;

  if (c.dataset.synth) {
    try {
      c.dataset.synth->validate();
    } catch (const ConfigError& e) {
      add(f, S::Error, "dataset.synth", e.what());
    }
    if (!c.dataset.path.empty()) add(f, S::Error, "dataset", "set either dataset.path or dataset.synth, not both");
  } else if (c.dataset.path.empty()) {
    add(f, S::Error, "dataset.path", "no dataset path or synth specification");
  } else if (!std::filesystem::exists(c.dataset.path, ec)) {
    add(f, S::Error, "dataset.path", "path does not exist: " + c.dataset.path.string());
  }
  if (!c.dataset.ground_truth.empty() && !std::filesystem::exists(c.dataset.ground_truth, ec)) {
    add(f, S::Error, "dataset.ground_truth", "path does not exist: " + c.dataset.ground_truth.string());
  }

  if (c.window.window_length < 2) add(f, S::Error, "window_length", "must be at least 2");
  if (!(c.window.train_frac > 0.0 && c.window.train_frac < 1.0)) add(f, S::Error, "train_frac", "must lie in (0, 1)");
  if (!(c.window.val_frac >= 0.0 && c.window.val_frac < 1.0)) add(f, S::Error, "val_frac", "must lie in [0, 1)");
  if (c.normalize != "per_flow") add(f, S::Error, "normalize", "only per_flow is supported");

  const bool naive = c.representation == Representation::Naive;
  if (c.metric) {
    if (*c.metric == Metric::Jsd && c.representation != Representation::Histogram) {
      add(f, S::Error, "metric", "jsd is defined on histograms only, not " + std::string(to_string(c.representation)));
    }
    if (naive) add(f, S::Warning, "metric", "ignored by the naive baseline");
  }
  if (c.linkage && naive) add(f, S::Warning, "linkage", "ignored by the naive baseline");
  if (naive && !c.partition_seed) add(f, S::Error, "partition_seed", "the naive baseline requires a partition seed");
  if (c.bins == 0) add(f, S::Error, "bins", "must be positive");
  if (!(c.welch.overlap >= 0.0 && c.welch.overlap < 1.0)) add(f, S::Error, "welch.overlap", "must lie in [0, 1)");
  if (c.welch.segment_length < 2) add(f, S::Error, "welch.segment_length", "must be at least 2");
  if (c.fs < 0.0) add(f, S::Error, "fs", "must be nonnegative");
  for (std::size_t i = 0; i < c.lags.size(); ++i) {
    if (c.lags[i] == 0 || (i > 0 && c.lags[i] <= c.lags[i - 1])) {
      add(f, S::Error, "lags", "must be strictly increasing positive integers");
      break;
    }
  }

  const bool grid = !c.k_grid.empty() || c.k_grid_auto;
  if (c.k && grid) add(f, S::Error, "k", "set either k or k_grid, not both");
  if (!c.k && !grid) add(f, S::Error, "k", "set k or k_grid");
  if (c.k && *c.k == 0) add(f, S::Error, "k", "must be at least 1");
  for (std::size_t i = 0; i < c.k_grid.size(); ++i) {
    if (c.k_grid[i] == 0 || (i > 0 && c.k_grid[i] <= c.k_grid[i - 1])) {
      add(f, S::Error, "k_grid", "must be strictly increasing positive integers");
      break;
    }
  }
  if (grid && c.k_grid.size() + (c.k_grid_auto ? 3 : 0) < 3) {
    add(f, S::Error, "k_grid", "knee selection needs at least 3 grid points");
  }
  if (c.k_step == 0) add(f, S::Error, "k_step", "must be positive");
  if (c.repetitions == 0) add(f, S::Error, "repetitions", "must be at least 1");

  try {
    const GruConfig g = c.gru_config();
    g.validate();
    if (c.profile == "desk" && g.hidden_size >= GruConfig::paper().hidden_size) {
      add(f, S::Warning, "hidden_size",
          "desk profile with hidden size " + std::to_string(g.hidden_size) + " will not run at desk scale");
    }
    if (const auto size = estimate_size(c.dataset)) {
      const auto [flows, steps] = *size;
      if (flows > 0 && c.k && *c.k > flows) {
        add(f, S::Error, "k", "k = " + std::to_string(*c.k) + " exceeds the flow count " + std::to_string(flows));
      }
      if (c.profile == "paper" && g.hidden_size >= 64 && (flows >= 64 || steps >= 8064)) {
        add(f, S::Warning, "profile",
            "paper profile on a trace with " + std::to_string(flows) +
                " flows may take hours on a CPU; consider profile desk");
      }
    }
  } catch (const ConfigError& e) {
    add(f, S::Error, "profile", e.what());
  }
  return f;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& x) { return x.severity == Finding::Severity::Error; });
}

void require_valid(const std::vector<Finding>& findings) {
  std::string msg;
  for (const auto& x : findings) {
    if (x.severity != Finding::Severity::Error) continue;
    if (!msg.empty()) msg += "; ";
    msg += x.field + ": " + x.message;
  }
  if (!msg.empty()) throw ConfigError("invalid configuration: " + msg);
}

namespace {

// Rejects keys outside `allowed` so typos do not silently fall back to
// defaults.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + key + "'");
    }
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + key + "' has the wrong type");
  }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out, const std::string& where = {}) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

template <typename T>
void maybe(const json& obj, const char* key, std::optional<T>& out, const std::string& where = {}) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = get<T>(obj, key, where);
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

SynthSpec parse_synth(const json& j) {
  check_keys(j, {"n_nodes", "steps", "interval_seconds", "seed", "groups"}, "dataset.synth.");
  SynthSpec s;
  maybe(j, "n_nodes", s.n_nodes, "dataset.synth.");
  maybe(j, "steps", s.steps, "dataset.synth.");
  maybe(j, "interval_seconds", s.interval_seconds, "dataset.synth.");
  maybe(j, "seed", s.seed, "dataset.synth.");
  if (!j.contains("groups") || !j["groups"].is_array()) throw ConfigError("dataset.synth.groups must be an array");
  for (const auto& g : j["groups"]) {
    check_keys(g, {"flow_count", "period_steps", "amplitude", "noise_std", "shape"}, "dataset.synth.groups[].");
    FlowGroup group;
    maybe(g, "flow_count", group.flow_count, "dataset.synth.groups[].");
    maybe(g, "period_steps", group.period_steps, "dataset.synth.groups[].");
    maybe(g, "amplitude", group.amplitude, "dataset.synth.groups[].");
    maybe(g, "noise_std", group.noise_std, "dataset.synth.groups[].");
    if (g.contains("shape")) group.shape = parse_wave_shape(get<std::string>(g, "shape", "dataset.synth.groups[]."));
    s.groups.push_back(group);
  }
  return s;
}

json synth_to_json(const SynthSpec& s) {
  json groups = json::array();
  for (const auto& g : s.groups) {
    groups.push_back({{"flow_count", g.flow_count},
                      {"period_steps", g.period_steps},
                      {"amplitude", g.amplitude},
                      {"noise_std", g.noise_std},
                      {"shape", std::string(to_string(g.shape))}});
  }
  return {{"n_nodes", s.n_nodes},
          {"steps", s.steps},
          {"interval_seconds", s.interval_seconds},
          {"seed", s.seed},
          {"groups", groups}};
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("config") && root["config"].is_object()) root = root["config"];
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  check_keys(root,
             {"dataset", "window_length", "train_frac", "val_frac", "normalize", "representation", "linkage", "metric",
              "bins", "lags", "fs", "welch", "psd_unit_mass", "k", "k_grid", "k_step", "repetitions", "profile",
              "hidden_size", "epochs", "learning_rate", "batch_size", "patience", "min_delta", "seed",
              "partition_seed", "units", "workers", "output_dir"},
             "");

  RunConfig c;
  if (root.contains("dataset")) {
    const json& d = root["dataset"];
    if (!d.is_object()) throw ConfigError("dataset must be an object");
    check_keys(d,
               {"path", "format", "synth", "ground_truth", "zero_fill_missing", "interval_seconds",
                "abilene_unit_bytes", "geant_value_to_bytes"},
               "dataset.");
    if (d.contains("path")) c.dataset.path = resolve(get<std::string>(d, "path", "dataset."), base_dir);
    if (d.contains("format")) c.dataset.format = parse_trace_format(get<std::string>(d, "format", "dataset."));
    if (d.contains("synth") && !d["synth"].is_null()) c.dataset.synth = parse_synth(d["synth"]);
    if (d.contains("ground_truth")) {
      c.dataset.ground_truth = resolve(get<std::string>(d, "ground_truth", "dataset."), base_dir);
    }
    maybe(d, "zero_fill_missing", c.dataset.ingest.zero_fill_missing, "dataset.");
    maybe(d, "interval_seconds", c.dataset.ingest.interval_seconds, "dataset.");
    maybe(d, "abilene_unit_bytes", c.dataset.ingest.abilene_unit_bytes, "dataset.");
    maybe(d, "geant_value_to_bytes", c.dataset.ingest.geant_value_to_bytes, "dataset.");
  }
  maybe(root, "window_length", c.window.window_length);
  maybe(root, "train_frac", c.window.train_frac);
  maybe(root, "val_frac", c.window.val_frac);
  maybe(root, "normalize", c.normalize);
  if (root.contains("representation")) c.representation = parse_representation(get<std::string>(root, "representation", ""));
  if (root.contains("linkage") && !root["linkage"].is_null()) c.linkage = parse_linkage(get<std::string>(root, "linkage", ""));
  if (root.contains("metric") && !root["metric"].is_null()) c.metric = parse_metric(get<std::string>(root, "metric", ""));
  maybe(root, "bins", c.bins);
  maybe(root, "lags", c.lags);
  maybe(root, "fs", c.fs);
  if (root.contains("welch")) {
    const json& w = root["welch"];
    check_keys(w, {"segment_length", "overlap"}, "welch.");
    maybe(w, "segment_length", c.welch.segment_length, "welch.");
    maybe(w, "overlap", c.welch.overlap, "welch.");
  }
  maybe(root, "psd_unit_mass", c.psd_unit_mass);
  maybe(root, "k", c.k);
  if (root.contains("k_grid") && !root["k_grid"].is_null()) {
    if (root["k_grid"].is_string()) {
      if (root["k_grid"] != "auto") throw ConfigError("k_grid must be a list of integers or \"auto\"");
      c.k_grid_auto = true;
    } else {
      c.k_grid = get<std::vector<std::size_t>>(root, "k_grid", "");
    }
  }
  maybe(root, "k_step", c.k_step);
  maybe(root, "repetitions", c.repetitions);
  maybe(root, "profile", c.profile);
  maybe(root, "hidden_size", c.hidden_size);
  maybe(root, "epochs", c.epochs);
  maybe(root, "learning_rate", c.learning_rate);
  maybe(root, "batch_size", c.batch_size);
  maybe(root, "patience", c.patience);
  maybe(root, "min_delta", c.min_delta);
  maybe(root, "seed", c.seed);
  maybe(root, "partition_seed", c.partition_seed);
  if (root.contains("units")) c.units = parse_units(get<std::string>(root, "units", ""));
  maybe(root, "workers", c.workers);
  if (root.contains("output_dir")) c.output_dir = resolve(get<std::string>(root, "output_dir", ""), base_dir);
  return c;
}

SynthSpec synth_spec_from_json(const std::string& json_text) {
  try {
    return parse_synth(json::parse(json_text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("synth spec is not valid JSON: ") + e.what());
  }
}

std::string synth_spec_to_json(const SynthSpec& spec) { return synth_to_json(spec).dump(2); }

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& c, bool include_runtime) {
  json d = {{"format", std::string(to_string(c.dataset.format))},
            {"zero_fill_missing", c.dataset.ingest.zero_fill_missing},
            {"interval_seconds", c.dataset.ingest.interval_seconds},
            {"abilene_unit_bytes", c.dataset.ingest.abilene_unit_bytes},
            {"geant_value_to_bytes", c.dataset.ingest.geant_value_to_bytes}};
  if (!c.dataset.path.empty()) d["path"] = c.dataset.path.generic_string();
  if (c.dataset.synth) d["synth"] = synth_to_json(*c.dataset.synth);
  if (!c.dataset.ground_truth.empty()) d["ground_truth"] = c.dataset.ground_truth.generic_string();

  const GruConfig g = c.gru_config();
  json j = {{"dataset", d},
            {"window_length", c.window.window_length},
            {"train_frac", c.window.train_frac},
            {"val_frac", c.window.val_frac},
            {"normalize", c.normalize},
            {"representation", std::string(to_string(c.representation))},
            {"bins", c.bins},
            {"lags", c.lags},
            {"fs", c.fs},
            {"welch", {{"segment_length", c.welch.segment_length}, {"overlap", c.welch.overlap}}},
            {"psd_unit_mass", c.psd_unit_mass},
            {"k_step", c.k_step},
            {"repetitions", c.repetitions},
            {"profile", c.profile},
            {"hidden_size", g.hidden_size},
            {"epochs", g.epochs},
            {"learning_rate", g.learning_rate},
            {"batch_size", g.batch_size},
            {"patience", g.patience},
            {"min_delta", g.min_delta},
            {"seed", c.seed},
            {"units", std::string(to_string(c.units))}};
  if (c.representation != Representation::Naive) {
    j["linkage"] = std::string(to_string(c.effective_linkage()));
    j["metric"] = std::string(to_string(c.effective_metric()));
  }
  if (c.k) j["k"] = *c.k;
  if (c.k_grid_auto) {
    j["k_grid"] = "auto";
  } else if (!c.k_grid.empty()) {
    j["k_grid"] = c.k_grid;
  }
  if (c.partition_seed) j["partition_seed"] = *c.partition_seed;
  if (include_runtime) {
    j["workers"] = c.workers;
    if (!c.output_dir.empty()) j["output_dir"] = c.output_dir.generic_string();
  }
  return j.dump(2);
}

}  // namespace tmcf
