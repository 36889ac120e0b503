#include "tmcf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmcf/errors.hpp"

namespace tmcf {

TmSeries::TmSeries(std::size_t n_nodes, std::size_t steps, std::uint32_t interval_seconds)
    : n_nodes_(n_nodes), steps_(steps), interval_seconds_(interval_seconds), values_(steps * n_nodes * n_nodes, 0.0) {
  if (n_nodes == 0) throw DataError("traffic matrix must have at least one node");
  if (interval_seconds == 0) throw DataError("interval_seconds must be positive");
}

TmSeries::TmSeries(std::size_t n_nodes, std::uint32_t interval_seconds, std::vector<double> values)
    : n_nodes_(n_nodes), interval_seconds_(interval_seconds), values_(std::move(values)) {
  if (n_nodes == 0) throw DataError("traffic matrix must have at least one node");
  if (interval_seconds == 0) throw DataError("interval_seconds must be positive");
  const std::size_t m = n_nodes * n_nodes;
  if (values_.size() % m != 0) {
    throw DataError("value count " + std::to_string(values_.size()) + " is not a multiple of N^2 = " +
                    std::to_string(m));
  }
  steps_ = values_.size() / m;
}

void TmSeries::validate() const {
  for (std::size_t idx = 0; idx < values_.size(); ++idx) {
    const double v = values_[idx];
    if (!std::isfinite(v)) {
      throw DataError("non-finite traffic value at step " + std::to_string(idx / flow_count()) + ", flow " +
                      std::to_string(idx % flow_count()));
    }
    if (v < 0.0) {
      throw DataError("negative traffic value at step " + std::to_string(idx / flow_count()) + ", flow " +
                      std::to_string(idx % flow_count()));
    }
  }
  if (!timestamps_.empty()) {
    if (timestamps_.size() != steps_) throw DataError("timestamp count does not match step count");
    for (std::size_t t = 1; t < timestamps_.size(); ++t) {
      if (timestamps_[t] <= timestamps_[t - 1]) throw DataError("timestamps must be strictly increasing");
    }
  }
}

FlowSet::FlowSet(std::size_t n_nodes, std::size_t steps)
    : n_nodes_(n_nodes), steps_(steps), data_(n_nodes * n_nodes * steps, 0.0) {}

FlowSet extract_flows(const TmSeries& tm) {
  FlowSet flows(tm.n_nodes(), tm.steps());
  const std::size_t m_count = tm.flow_count();
  for (std::size_t t = 0; t < tm.steps(); ++t) {
    const auto row = tm.step(t);
    for (std::size_t m = 0; m < m_count; ++m) flows(m, t) = row[m];
  }
  return flows;
}

TmSeries reassemble(const FlowSet& flows, std::uint32_t interval_seconds) {
  TmSeries tm(flows.n_nodes(), flows.steps(), interval_seconds);
  for (std::size_t t = 0; t < flows.steps(); ++t) {
    auto row = tm.step(t);
    for (std::size_t m = 0; m < flows.flow_count(); ++m) row[m] = flows(m, t);
  }
  return tm;
}

ScaleParams fit_scale(const FlowSet& flows, TimeRange fit) {
  if (fit.size() == 0 || fit.end > flows.steps()) throw DataError("scale fit range is empty or out of bounds");
  ScaleParams params;
  params.min.resize(flows.flow_count());
  params.max.resize(flows.flow_count());
  for (std::size_t m = 0; m < flows.flow_count(); ++m) {
    const auto series = flows.flow(m).subspan(fit.begin, fit.size());
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    params.min[m] = *lo;
    params.max[m] = *hi;
  }
  return params;
}

namespace {

void check_params(const FlowSet& flows, const ScaleParams& params) {
  if (params.min.size() != flows.flow_count() || params.max.size() != flows.flow_count()) {
    throw DataError("scale parameters cover " + std::to_string(params.min.size()) + " flows, expected " +
                    std::to_string(flows.flow_count()));
  }
}

}  // namespace

FlowSet normalize(const FlowSet& flows, const ScaleParams& params) {
  check_params(flows, params);
  FlowSet out = flows;
  for (std::size_t m = 0; m < flows.flow_count(); ++m) {
    auto series = out.flow(m);
    if (params.is_constant(m)) {
      std::fill(series.begin(), series.end(), 0.0);
      continue;
    }
    const double lo = params.min[m];
    const double range = params.max[m] - lo;
    for (double& v : series) v = (v - lo) / range;
  }
  return out;
}

double denormalize_value(double normalized, const ScaleParams& params, std::size_t m) {
  if (params.is_constant(m)) return params.min[m];
  return normalized * (params.max[m] - params.min[m]) + params.min[m];
}

FlowSet denormalize(const FlowSet& flows, const ScaleParams& params) {
  check_params(flows, params);
  FlowSet out = flows;
  for (std::size_t m = 0; m < flows.flow_count(); ++m) {
    for (double& v : out.flow(m)) v = denormalize_value(v, params, m);
  }
  return out;
}

SplitRanges split(std::size_t steps, double train_frac, double val_frac, std::size_t window_length) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must lie in (0, 1)");
  if (!(val_frac >= 0.0 && val_frac < 1.0)) throw ConfigError("val_frac must lie in [0, 1)");
  if (window_length == 0) throw ConfigError("window_length must be positive");

  // The epsilon keeps products such as 0.8 * 1000 from landing just below an integer.
  const auto train_total = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(steps) + 1e-9));
  const auto val_count = static_cast<std::size_t>(std::floor(val_frac * static_cast<double>(train_total) + 1e-9));

  SplitRanges r;
  r.train = {0, train_total - val_count};
  r.validation = {train_total - val_count, train_total};
  r.test = {train_total, steps};

  auto require = [&](const TimeRange& range, const char* name) {
    if (range.size() < window_length) {
      throw DataError(std::string(name) + " region has " + std::to_string(range.size()) +
                      " observations, fewer than one window of " + std::to_string(window_length) + " (T = " +
                      std::to_string(steps) + ")");
    }
  };
  require(r.train, "train");
  if (val_count > 0) require(r.validation, "validation");
  require(r.test, "test");
  return r;
}

WindowedDataset make_windows(const FlowSet& flows, std::span<const std::size_t> flow_subset, TimeRange range,
                             std::size_t window_length) {
  if (window_length < 2) throw ConfigError("window_length must be at least 2 (one input and one target)");
  if (range.end > flows.steps()) throw DataError("window range exceeds series length");
  if (range.size() < window_length) {
    throw DataError("range of " + std::to_string(range.size()) + " observations is shorter than window length " +
                    std::to_string(window_length));
  }
  for (const std::size_t m : flow_subset) {
    if (m >= flows.flow_count()) throw DataError("flow index " + std::to_string(m) + " out of range");
  }

  WindowedDataset ds;
  ds.history = window_length - 1;
  ds.width = flow_subset.size();
  ds.samples = range.size() - window_length + 1;
  ds.first_target_step = range.begin + ds.history;
  ds.inputs.resize(ds.samples * ds.history * ds.width);
  ds.targets.resize(ds.samples * ds.width);

  for (std::size_t s = 0; s < ds.samples; ++s) {
    const std::size_t t0 = range.begin + s;
    for (std::size_t step = 0; step < ds.history; ++step) {
      double* row = ds.inputs.data() + (s * ds.history + step) * ds.width;
      for (std::size_t k = 0; k < ds.width; ++k) row[k] = flows(flow_subset[k], t0 + step);
    }
    double* target = ds.targets.data() + s * ds.width;
    for (std::size_t k = 0; k < ds.width; ++k) target[k] = flows(flow_subset[k], t0 + ds.history);
  }
  return ds;
}

PreparedTrace prepare_trace(TmSeries tm, const WindowOptions& options) {
  tm.validate();
  PreparedTrace p;
  p.window_length = options.window_length;
  p.splits = split(tm.steps(), options.train_frac, options.val_frac, options.window_length);
  p.raw = extract_flows(tm);
  p.scale = fit_scale(p.raw, p.splits.train);
  p.normalized = normalize(p.raw, p.scale);
  p.tm = std::move(tm);
  return p;
}

}  // namespace tmcf
