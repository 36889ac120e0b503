#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/dataset.hpp"
#include "tmcf/eval.hpp"
#include "tmcf/gru.hpp"
#include "tmcf/repr.hpp"
#include "tmcf/synth.hpp"
#include "tmcf/trace_io.hpp"

namespace tmcf {

/// Where the trace comes from: a file in one of the supported layouts, or an
/// inline synthetic specification.
struct DatasetConfig {
  std::filesystem::path path;
  TraceFormat format = TraceFormat::Csv;
  std::optional<SynthSpec> synth;
  std::filesystem::path ground_truth;  // optional partition JSON
  IngestOptions ingest;
};

struct RunConfig {
  DatasetConfig dataset;
  WindowOptions window;
  std::string normalize = "per_flow";

  Representation representation = Representation::Histogram;
  std::optional<Linkage> linkage;
  std::optional<Metric> metric;
  std::size_t bins = 50;
  std::vector<std::size_t> lags;
  double fs = 0.0;
  WelchParams welch;
  bool psd_unit_mass = true;

  /// Exactly one of `k` and `k_grid` is set. A grid runs the sweep and picks
  /// K at the knee.
  std::optional<std::size_t> k;
  std::vector<std::size_t> k_grid;
  bool k_grid_auto = false;  // grid 1, 1 + k_step, ..., M
  std::size_t k_step = 10;
  std::size_t repetitions = 5;

  std::string profile = "paper";
  std::optional<std::size_t> hidden_size;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> patience;
  std::optional<double> min_delta;

  std::uint64_t seed = 0;
  std::optional<std::uint64_t> partition_seed;
  TrafficUnits units = TrafficUnits::BytesPerInterval;

  std::size_t workers = 0;  // 0: default_workers()
  std::filesystem::path output_dir;

  ReprOptions repr_options() const;
  GruConfig gru_config() const;
  Linkage effective_linkage() const;
  Metric effective_metric() const;
};

struct Finding {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string field;
  std::string message;
};

/// Empty iff the configuration is usable; warnings do not block a run.
std::vector<Finding> validate_config(const RunConfig& config);
bool has_errors(const std::vector<Finding>& findings);
/// Throws ConfigError carrying every error finding.
void require_valid(const std::vector<Finding>& findings);

/// Parses a JSON configuration. A document holding a "config" object (a run
/// manifest) is accepted as well. Relative paths resolve against `base_dir`.
/// Unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// The `dataset.synth` object on its own.
SynthSpec synth_spec_from_json(const std::string& json_text);
std::string synth_spec_to_json(const SynthSpec& spec);

/// Canonical JSON echo with sorted keys. With `include_runtime` false the
/// fields that do not affect results (workers, output_dir) are left out.
std::string config_to_json(const RunConfig& config, bool include_runtime = true);

}  // namespace tmcf
