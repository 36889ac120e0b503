#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/dataset.hpp"
#include "tmcf/eval.hpp"
#include "tmcf/gru.hpp"
#include "tmcf/predict.hpp"
#include "tmcf/repr.hpp"

namespace tmcf {

/// Histogram pairs with complete linkage, ACF and PSD with average linkage.
Linkage default_linkage(Representation r);

/// 1, 1 + step, 1 + 2 step, ... and finally M itself.
std::vector<std::size_t> default_k_grid(std::size_t flow_count, std::size_t step = 10);

/// Everything HAC needs for one representation. Features are computed on the
/// scale-fit (training) region of the normalized flows.
struct HacInputs {
  ReprMatrix features;
  DissimilarityMatrix dissimilarity;
  Dendrogram dendrogram;
};

HacInputs build_dendrogram(const PreparedTrace& trace, const ReprOptions& options, Linkage linkage, Metric metric);

/// Errors of one forecast over the test region.
struct ForecastErrors {
  double rmse_normalized = 0.0;
  double rmse_physical = 0.0;                 // Mbps
  std::vector<double> per_flow_normalized;    // M entries
  std::vector<double> per_flow_physical;      // M entries, Mbps
  std::size_t test_samples = 0;
};

ForecastErrors evaluate_forecast(const PreparedTrace& trace, const Forecast& forecast, TrafficUnits units);

/// Train one model per cluster and forecast the test region.
struct PartitionRun {
  std::vector<ClusterModel> models;
  Forecast forecast;
  ForecastErrors errors;
};

PartitionRun run_partition(const PreparedTrace& trace, const Partition& partition, const GruConfig& config,
                           TrafficUnits units, std::size_t workers = 1);

struct SweepOptions {
  ReprOptions repr;
  std::optional<Linkage> linkage;
  std::optional<Metric> metric;
  std::vector<std::size_t> k_grid;
  std::size_t repetitions = 5;
  GruConfig base;
  std::uint64_t partition_seed = 0;  // naive only; repetition r uses partition_seed + r
  std::size_t workers = 1;
};

struct SweepPoint {
  std::size_t k = 0;
  std::size_t repetition = 0;
  double rmse_normalized = 0.0;
  double runtime_seconds = 0.0;
};

struct SweepResult {
  SweepCurve curve;
  std::vector<SweepPoint> points;  // k-major, repetition-minor
};

/// For each K and repetition r: cluster (the HAC dendrogram is built once,
/// naive partitions are redrawn per repetition), train with predictor seed
/// base.seed + r and record the normalized test RMSE. Jobs run on `workers`
/// threads; the result does not depend on the worker count.
SweepResult k_sweep(const PreparedTrace& trace, const SweepOptions& options);

}  // namespace tmcf
