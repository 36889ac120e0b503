#pragma once

#include <cstddef>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/dataset.hpp"
#include "tmcf/gru.hpp"

namespace tmcf {

/// One trained forecaster and the flows it predicts, in column order.
struct ClusterModel {
  int cluster_id = 0;  // partition label
  std::vector<std::size_t> flows;
  GruModel model;
  TrainReport report;
};

/// Trains one model per cluster on normalized flows. Cluster c uses seed
/// mix_seed(config.seed, c), so results do not depend on `workers`.
/// K = 1 is entire-matrix prediction, K = M is local prediction.
std::vector<ClusterModel> train_partitioned(const Partition& partition, const FlowSet& normalized,
                                            const GruConfig& config, const SplitRanges& splits,
                                            std::size_t window_length, std::size_t workers = 1);

/// One-step-ahead forecasts for every target step of `range`.
struct Forecast {
  std::size_t first_step = 0;  // absolute time index of the first target
  std::size_t steps = 0;
  std::size_t flow_count = 0;
  std::vector<double> normalized;  // steps x flows
  TmSeries predicted;              // denormalized, steps matrices

  double normalized_at(std::size_t s, std::size_t m) const { return normalized[s * flow_count + m]; }
};

/// Runs every cluster model over windows of `range` and scatters the outputs
/// back to flow positions.
Forecast predict_tm(const std::vector<ClusterModel>& models, const Partition& partition, const FlowSet& normalized,
                    TimeRange range, std::size_t window_length, const ScaleParams& scale,
                    std::uint32_t interval_seconds);

/// Observed values at the target steps of `range` (steps x flows), taken
/// from any flow set (raw or normalized).
std::vector<double> window_targets(const FlowSet& flows, TimeRange range, std::size_t window_length);

/// The raw traffic matrices at the target steps of `range`.
TmSeries observed_targets(const FlowSet& raw, TimeRange range, std::size_t window_length,
                          std::uint32_t interval_seconds);

}  // namespace tmcf
