#include "tmcf/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "tmcf/errors.hpp"
#include "tmcf/parallel.hpp"

namespace tmcf {

Linkage default_linkage(Representation r) {
  return r == Representation::Histogram ? Linkage::Complete : Linkage::Average;
}

std::vector<std::size_t> default_k_grid(std::size_t flow_count, std::size_t step) {
  if (flow_count == 0) throw ConfigError("k grid over zero flows");
  if (step == 0) throw ConfigError("k grid step must be positive");
  std::vector<std::size_t> grid;
  for (std::size_t k = 1; k <= flow_count; k += step) grid.push_back(k);
  if (grid.back() != flow_count) grid.push_back(flow_count);
  return grid;
}

HacInputs build_dendrogram(const PreparedTrace& trace, const ReprOptions& options, Linkage linkage, Metric metric) {
  if (options.kind == Representation::Naive) throw ConfigError("the naive baseline has no dendrogram");
  HacInputs out;
  out.features = represent(trace.normalized, trace.splits.train, trace.interval_seconds(), options);
  out.dissimilarity = pairwise_dissimilarity(out.features, metric);
  out.dendrogram = hac(out.dissimilarity, linkage);
  return out;
}

ForecastErrors evaluate_forecast(const PreparedTrace& trace, const Forecast& forecast, TrafficUnits units) {
  const TimeRange test = trace.splits.test;
  const std::vector<double> truth_n = window_targets(trace.normalized, test, trace.window_length);
  const TmSeries truth_p = observed_targets(trace.raw, test, trace.window_length, trace.interval_seconds());
  const std::size_t m_count = trace.normalized.flow_count();

  ForecastErrors e;
  e.test_samples = forecast.steps;
  e.rmse_normalized = rmse(truth_n, forecast.normalized);
  e.rmse_physical = rmse_physical(truth_p, forecast.predicted, units);
  e.per_flow_normalized = per_flow_rmse(truth_n, forecast.normalized, m_count);
  e.per_flow_physical = per_flow_rmse(truth_p.values(), forecast.predicted.values(), m_count);
  const double factor = mbps_factor(units, trace.interval_seconds());
  for (double& v : e.per_flow_physical) v *= factor;
  return e;
}

PartitionRun run_partition(const PreparedTrace& trace, const Partition& partition, const GruConfig& config,
                           TrafficUnits units, std::size_t workers) {
  PartitionRun run;
  run.models = train_partitioned(partition, trace.normalized, config, trace.splits, trace.window_length, workers);
  run.forecast = predict_tm(run.models, partition, trace.normalized, trace.splits.test, trace.window_length,
                            trace.scale, trace.interval_seconds());
  run.errors = evaluate_forecast(trace, run.forecast, units);
  return run;
}

SweepResult k_sweep(const PreparedTrace& trace, const SweepOptions& options) {
  const std::size_t m_count = trace.normalized.flow_count();
  if (options.repetitions == 0) throw ConfigError("sweep repetitions must be at least 1");
  if (options.k_grid.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 0; i < options.k_grid.size(); ++i) {
    const std::size_t k = options.k_grid[i];
    if (k < 1 || k > m_count) {
      throw ConfigError("sweep K = " + std::to_string(k) + " outside [1, " + std::to_string(m_count) + "]");
    }
    if (i > 0 && k <= options.k_grid[i - 1]) throw ConfigError("sweep grid must be strictly increasing");
  }
  options.base.validate();

  const bool naive = options.repr.kind == Representation::Naive;
  std::optional<HacInputs> hac_inputs;
  if (!naive) {
    hac_inputs = build_dendrogram(trace, options.repr, options.linkage.value_or(default_linkage(options.repr.kind)),
                                  options.metric.value_or(default_metric(options.repr.kind)));
  }

  const std::size_t reps = options.repetitions;
  SweepResult result;
  result.points.resize(options.k_grid.size() * reps);
  parallel_for(result.points.size(), options.workers, [&](std::size_t job) {
    const std::size_t k = options.k_grid[job / reps];
    const std::size_t r = job % reps;
    const auto start = std::chrono::steady_clock::now();
    const Partition partition =
        naive ? naive_partition(m_count, k, options.partition_seed + r) : cut(hac_inputs->dendrogram, k);
    GruConfig cfg = options.base;
    cfg.seed = options.base.seed + r;
    const PartitionRun run = run_partition(trace, partition, cfg, TrafficUnits::BytesPerInterval, 1);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.points[job] = SweepPoint{k, r, run.errors.rmse_normalized, elapsed.count()};
  });

  SweepCurve& curve = result.curve;
  curve.repetitions = reps;
  curve.k_values = options.k_grid;
  for (std::size_t i = 0; i < options.k_grid.size(); ++i) {
    double mean = 0.0, runtime = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      mean += result.points[i * reps + r].rmse_normalized;
      runtime += result.points[i * reps + r].runtime_seconds;
    }
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = result.points[i * reps + r].rmse_normalized - mean;
      var += d * d;
    }
    // Sample standard deviation; a single repetition has no spread.
    const double sd = reps > 1 ? std::sqrt(var / static_cast<double>(reps - 1)) : 0.0;
    curve.mean_rmse.push_back(mean);
    curve.rmse_std.push_back(sd);
    curve.mean_runtime_seconds.push_back(runtime / static_cast<double>(reps));
  }
  return result;
}

}  // namespace tmcf
