#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/config.hpp"
#include "tmcf/eval.hpp"
#include "tmcf/sweep.hpp"

namespace tmcf {

struct PipelineOptions {
  /// Reuse stages whose key and recorded output hashes match the existing
  /// manifest in the run directory.
  bool resume = false;
  std::ostream* log = nullptr;
};

struct StageRecord {
  std::string name;
  std::string key;  // hash of the stage inputs and the upstream key
  bool reused = false;
  double wall_time_seconds = 0.0;
  std::map<std::string, std::string> outputs;  // file name -> content hash
};

struct PipelineResult {
  std::filesystem::path run_dir;
  std::string report_json;  // byte-identical across identical runs
  Partition partition;
  std::optional<Partition> ground_truth;
  std::optional<SweepCurve> sweep;
  std::optional<KneeResult> knee;
  ForecastErrors errors;
  std::vector<StageRecord> stages;
};

/// ingest -> prepare -> represent -> [sweep] -> cluster -> train -> predict ->
/// evaluate. Every intermediate artifact is written to config.output_dir
/// together with manifest.json (config echo, seeds, versions, wall times,
/// stage hashes) and report.json (metrics only, no timing). A failing stage
/// is reported by name; artifacts written so far are kept.
PipelineResult run_pipeline(const RunConfig& config, const PipelineOptions& options = {});

/// Loads or generates the trace described by `dataset`, with the planted
/// partition for synthetic traces or the ground-truth file when one is named.
std::pair<TmSeries, std::optional<Partition>> load_dataset(const DatasetConfig& dataset);

std::string_view library_version();

}  // namespace tmcf
