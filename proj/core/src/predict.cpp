#include "tmcf/predict.hpp"

#include <algorithm>
#include <string>

#include "tmcf/errors.hpp"
#include "tmcf/parallel.hpp"

namespace tmcf {

std::vector<ClusterModel> train_partitioned(const Partition& partition, const FlowSet& normalized,
                                            const GruConfig& config, const SplitRanges& splits,
                                            std::size_t window_length, std::size_t workers) {
  partition.validate();
  config.validate();
  if (partition.size() != normalized.flow_count()) {
    throw DataError("partition covers " + std::to_string(partition.size()) + " flows, trace has " +
                    std::to_string(normalized.flow_count()));
  }
  const auto groups = partition.members();
  std::vector<ClusterModel> out(groups.size());

  parallel_for(groups.size(), workers, [&](std::size_t c) {
    const auto& flows = groups[c];
    GruConfig cfg = config;
    cfg.seed = mix_seed(config.seed, c + 1);
    const WindowedDataset train_ds = make_windows(normalized, flows, splits.train, window_length);
    const WindowedDataset val_ds = splits.validation.size() >= window_length
                                       ? make_windows(normalized, flows, splits.validation, window_length)
                                       : WindowedDataset{};
    TrainResult result = train(cfg, train_ds, val_ds);
    out[c] = ClusterModel{static_cast<int>(c) + 1, flows, std::move(result.model), std::move(result.report)};
  });
  return out;
}

std::vector<double> window_targets(const FlowSet& flows, TimeRange range, std::size_t window_length) {
  if (range.size() < window_length || range.end > flows.steps()) throw DataError("target range too short or out of bounds");
  const std::size_t steps = range.size() - window_length + 1;
  const std::size_t m_count = flows.flow_count();
  std::vector<double> out(steps * m_count);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t m = 0; m < m_count; ++m) out[s * m_count + m] = flows(m, range.begin + s + window_length - 1);
  }
  return out;
}

TmSeries observed_targets(const FlowSet& raw, TimeRange range, std::size_t window_length,
                          std::uint32_t interval_seconds) {
  return TmSeries(raw.n_nodes(), interval_seconds, window_targets(raw, range, window_length));
}

Forecast predict_tm(const std::vector<ClusterModel>& models, const Partition& partition, const FlowSet& normalized,
                    TimeRange range, std::size_t window_length, const ScaleParams& scale,
                    std::uint32_t interval_seconds) {
  partition.validate();
  const std::size_t m_count = normalized.flow_count();
  if (partition.size() != m_count) throw DataError("partition does not match the flow count");
  if (scale.size() != m_count) throw DataError("scale parameters do not match the flow count");
  if (range.size() < window_length) throw DataError("prediction range shorter than one window");

  Forecast fc;
  fc.first_step = range.begin + window_length - 1;
  fc.steps = range.size() - window_length + 1;
  fc.flow_count = m_count;
  fc.normalized.assign(fc.steps * m_count, 0.0);
  std::vector<int> covered(m_count, 0);

  for (int label = 1; label <= partition.k; ++label) {
    const auto it = std::find_if(models.begin(), models.end(), [&](const ClusterModel& cm) { return cm.cluster_id == label; });
    if (it == models.end()) throw DataError("no model for cluster " + std::to_string(label));
    const ClusterModel& cm = *it;
    for (const std::size_t m : cm.flows) {
      if (m >= m_count || partition.labels[m] != label) {
        throw DataError("model for cluster " + std::to_string(label) + " does not match the partition");
      }
    }
    const WindowedDataset ds = make_windows(normalized, cm.flows, range, window_length);
    constexpr std::size_t kChunk = 256;
    for (std::size_t first = 0; first < ds.samples; first += kChunk) {
      const std::size_t count = std::min(kChunk, ds.samples - first);
      const Eigen::MatrixXd out = gru_forward(cm.model, ds, first, count);
      for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t k = 0; k < cm.flows.size(); ++k) {
          fc.normalized[(first + s) * m_count + cm.flows[k]] =
              out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s));
        }
      }
    }
    for (const std::size_t m : cm.flows) ++covered[m];
  }
  for (std::size_t m = 0; m < m_count; ++m) {
    if (covered[m] != 1) throw DataError("flow " + std::to_string(m) + " predicted " + std::to_string(covered[m]) + " times");
  }

  std::vector<double> physical(fc.normalized.size());
  for (std::size_t s = 0; s < fc.steps; ++s) {
    for (std::size_t m = 0; m < m_count; ++m) {
      physical[s * m_count + m] = denormalize_value(fc.normalized[s * m_count + m], scale, m);
    }
  }
  fc.predicted = TmSeries(normalized.n_nodes(), interval_seconds, std::move(physical));
  return fc;
}

}  // namespace tmcf
