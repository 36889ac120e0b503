#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace tmcf {

/// A sequence of T traffic matrices, each N x N, stored time-major and
/// row-major within a step: value(t, i, j) = values[t*N*N + i*N + j].
/// Entries are traffic volume per interval (bytes unless stated otherwise).
class TmSeries {
 public:
  TmSeries() = default;
  TmSeries(std::size_t n_nodes, std::size_t steps, std::uint32_t interval_seconds);
  TmSeries(std::size_t n_nodes, std::uint32_t interval_seconds, std::vector<double> values);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t flow_count() const noexcept { return n_nodes_ * n_nodes_; }
  std::uint32_t interval_seconds() const noexcept { return interval_seconds_; }

  double& at(std::size_t t, std::size_t i, std::size_t j) {
    return values_[t * flow_count() + i * n_nodes_ + j];
  }
  double at(std::size_t t, std::size_t i, std::size_t j) const {
    return values_[t * flow_count() + i * n_nodes_ + j];
  }

  /// The N*N entries of step t in row-major order.
  std::span<const double> step(std::size_t t) const {
    return {values_.data() + t * flow_count(), flow_count()};
  }
  std::span<double> step(std::size_t t) { return {values_.data() + t * flow_count(), flow_count()}; }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  std::vector<std::int64_t>& timestamps() noexcept { return timestamps_; }
  const std::vector<std::int64_t>& timestamps() const noexcept { return timestamps_; }

  /// Throws DataError on negative or non-finite entries, or non-monotone
  /// timestamps.
  void validate() const;

  friend bool operator==(const TmSeries&, const TmSeries&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t steps_ = 0;
  std::uint32_t interval_seconds_ = 0;
  std::vector<double> values_;
  std::vector<std::int64_t> timestamps_;
};

/// M = N^2 univariate series of equal length. Flow m corresponds to the
/// source/destination pair (m / N, m % N).
class FlowSet {
 public:
  FlowSet() = default;
  FlowSet(std::size_t n_nodes, std::size_t steps);

  std::size_t n_nodes() const noexcept { return n_nodes_; }
  std::size_t flow_count() const noexcept { return n_nodes_ * n_nodes_; }
  std::size_t steps() const noexcept { return steps_; }

  std::span<const double> flow(std::size_t m) const { return {data_.data() + m * steps_, steps_}; }
  std::span<double> flow(std::size_t m) { return {data_.data() + m * steps_, steps_}; }

  double operator()(std::size_t m, std::size_t t) const { return data_[m * steps_ + t]; }
  double& operator()(std::size_t m, std::size_t t) { return data_[m * steps_ + t]; }

  std::size_t flow_index(std::size_t src, std::size_t dst) const noexcept { return src * n_nodes_ + dst; }
  std::size_t source_of(std::size_t m) const noexcept { return m / n_nodes_; }
  std::size_t destination_of(std::size_t m) const noexcept { return m % n_nodes_; }

  friend bool operator==(const FlowSet&, const FlowSet&) = default;

 private:
  std::size_t n_nodes_ = 0;
  std::size_t steps_ = 0;
  std::vector<double> data_;
};

/// Per-flow min-max statistics.
struct ScaleParams {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const noexcept { return min.size(); }
  bool is_constant(std::size_t m) const { return min[m] == max[m]; }
};

/// Half-open index range [begin, end) over the time axis.
struct TimeRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

/// Chronological train / validation / test split. Validation is the tail of
/// the training region, test is everything after it.
struct SplitRanges {
  TimeRange train;
  TimeRange validation;
  TimeRange test;
};

/// Sliding-window samples. Sample s has history rows s..s+history-1 of the
/// source range and target row s+history.
struct WindowedDataset {
  std::size_t samples = 0;
  std::size_t history = 0;  // L - 1
  std::size_t width = 0;    // d, flows per row
  std::vector<double> inputs;   // samples x history x width
  std::vector<double> targets;  // samples x width
  std::size_t first_target_step = 0;  // absolute time index of sample 0's target

  double input(std::size_t s, std::size_t step, std::size_t k) const {
    return inputs[(s * history + step) * width + k];
  }
  double target(std::size_t s, std::size_t k) const { return targets[s * width + k]; }
};

TmSeries reassemble(const FlowSet& flows, std::uint32_t interval_seconds);
FlowSet extract_flows(const TmSeries& tm);

/// Per-flow min and max over `fit`.
ScaleParams fit_scale(const FlowSet& flows, TimeRange fit);

/// (x - min) / (max - min) per flow; constant flows map to 0. No clipping.
FlowSet normalize(const FlowSet& flows, const ScaleParams& params);
/// Inverse of normalize; constant flows restore the stored constant.
FlowSet denormalize(const FlowSet& flows, const ScaleParams& params);
double denormalize_value(double normalized, const ScaleParams& params, std::size_t m);

/// Contiguous split of `steps` observations. The train region is
/// floor(train_frac * steps) long and its last floor(val_frac * train) steps
/// become validation. Each non-empty region must hold at least one window of
/// `window_length` observations.
SplitRanges split(std::size_t steps, double train_frac, double val_frac, std::size_t window_length);

/// Windows over `range` restricted to `flow_subset` (in the given order).
WindowedDataset make_windows(const FlowSet& flows, std::span<const std::size_t> flow_subset, TimeRange range,
                             std::size_t window_length);

/// Window length and split fractions shared by every stage.
struct WindowOptions {
  std::size_t window_length = 11;  // 10 inputs + 1 target
  double train_frac = 0.8;
  double val_frac = 0.1;
};

/// A trace after flow extraction, splitting and per-flow min-max scaling
/// fitted on the training region.
struct PreparedTrace {
  TmSeries tm;
  FlowSet raw;
  FlowSet normalized;
  ScaleParams scale;
  SplitRanges splits;
  std::size_t window_length = 11;

  std::uint32_t interval_seconds() const noexcept { return tm.interval_seconds(); }
};

PreparedTrace prepare_trace(TmSeries tm, const WindowOptions& options);

}  // namespace tmcf
