#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/dataset.hpp"

namespace tmcf {

/// Units of the trace values, used for the physical (Mbps) RMSE.
enum class TrafficUnits { BytesPerInterval, BitsPerInterval, Mbps };

TrafficUnits parse_units(std::string_view name);
std::string_view to_string(TrafficUnits units);

/// Multiplier turning one trace value into Mbps.
double mbps_factor(TrafficUnits units, std::uint32_t interval_seconds);

/// Root of the mean squared elementwise error over all entries.
double rmse(std::span<const double> truth, std::span<const double> pred);
double rmse(const TmSeries& truth, const TmSeries& pred);

/// RMSE after converting both series to Mbps with the trace interval.
double rmse_physical(const TmSeries& truth, const TmSeries& pred, TrafficUnits units = TrafficUnits::BytesPerInterval);

/// Per-flow RMSE over a steps x flows buffer. The pooled scalar RMSE equals
/// sqrt(mean(per_flow^2)).
std::vector<double> per_flow_rmse(std::span<const double> truth, std::span<const double> pred, std::size_t flows);

/// Adjusted Rand index from the contingency table.
double ari(const Partition& a, const Partition& b);

/// Mutual information normalised by the arithmetic mean of both entropies.
/// Returns 0 when either partition has zero entropy.
double nmi(const Partition& a, const Partition& b);

struct ClusterStats {
  std::size_t k = 0;
  std::size_t min_size = 0;
  double mean_size = 0.0;
  std::size_t max_size = 0;
  std::size_t n_singletons = 0;
  double singleton_pct = 0.0;
};

ClusterStats cluster_stats(const Partition& p);

/// Sample Pearson correlation; nullopt when either vector has zero variance.
std::optional<double> error_correlation(std::span<const double> a, std::span<const double> b);

struct SweepCurve {
  std::vector<std::size_t> k_values;
  std::vector<double> mean_rmse;
  std::vector<double> rmse_std;
  std::vector<double> mean_runtime_seconds;
  std::size_t repetitions = 1;
};

struct KneeResult {
  std::size_t k = 0;
  std::size_t index = 0;
  bool knee_found = false;
  std::vector<double> difference;  // y_d per point
};

/// Kneedle with sensitivity 1 and no smoothing. A knee is a local maximum of
/// the difference curve that is followed by a drop below its threshold;
/// among those the largest difference wins. Without a knee the argmin of
/// `y` is returned with knee_found = false.
KneeResult kneedle(std::span<const double> x, std::span<const double> y, double sensitivity = 1.0);
KneeResult kneedle(const SweepCurve& curve);

}  // namespace tmcf
