#include "tmcf/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "tmcf/errors.hpp"

namespace tmcf {

TrafficUnits parse_units(std::string_view name) {
  if (name == "bytes") return TrafficUnits::BytesPerInterval;
  if (name == "bits") return TrafficUnits::BitsPerInterval;
  if (name == "mbps") return TrafficUnits::Mbps;
  throw ConfigError("unknown traffic units '" + std::string(name) + "' (expected bytes, bits or mbps)");
}

std::string_view to_string(TrafficUnits units) {
  switch (units) {
    case TrafficUnits::BytesPerInterval:
      return "bytes";
    case TrafficUnits::BitsPerInterval:
      return "bits";
    case TrafficUnits::Mbps:
      return "mbps";
  }
  return "bytes";
}

double mbps_factor(TrafficUnits units, std::uint32_t interval_seconds) {
  if (interval_seconds == 0) throw ConfigError("interval_seconds must be positive");
  const double per_second = 1.0 / (static_cast<double>(interval_seconds) * 1e6);
  switch (units) {
    case TrafficUnits::BytesPerInterval:
      return 8.0 * per_second;
    case TrafficUnits::BitsPerInterval:
      return per_second;
    case TrafficUnits::Mbps:
      return 1.0;
  }
  return 8.0 * per_second;
}

double rmse(std::span<const double> truth, std::span<const double> pred) {
  if (truth.size() != pred.size()) {
    throw DataError("rmse: shape mismatch (" + std::to_string(truth.size()) + " vs " + std::to_string(pred.size()) + ")");
  }
  if (truth.empty()) throw DataError("rmse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = truth[i] - pred[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(truth.size()));
}

double rmse(const TmSeries& truth, const TmSeries& pred) {
  if (truth.n_nodes() != pred.n_nodes() || truth.steps() != pred.steps()) throw DataError("rmse: shape mismatch");
  return rmse(truth.values(), pred.values());
}

double rmse_physical(const TmSeries& truth, const TmSeries& pred, TrafficUnits units) {
  return rmse(truth, pred) * mbps_factor(units, truth.interval_seconds());
}

std::vector<double> per_flow_rmse(std::span<const double> truth, std::span<const double> pred, std::size_t flows) {
  if (truth.size() != pred.size()) throw DataError("per_flow_rmse: shape mismatch");
  if (flows == 0 || truth.size() % flows != 0 || truth.empty()) throw DataError("per_flow_rmse: bad flow count");
  const std::size_t steps = truth.size() / flows;
  std::vector<double> out(flows, 0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t m = 0; m < flows; ++m) {
      const double e = truth[s * flows + m] - pred[s * flows + m];
      out[m] += e * e;
    }
  }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(steps));
  return out;
}

namespace {

struct Contingency {
  std::map<std::pair<int, int>, std::size_t> cells;
  std::map<int, std::size_t> rows;
  std::map<int, std::size_t> cols;
  std::size_t n = 0;
};

Contingency contingency(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw DataError("partition lengths differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  Contingency c;
  c.n = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++c.cells[{a.labels[i], b.labels[i]}];
    ++c.rows[a.labels[i]];
    ++c.cols[b.labels[i]];
  }
  return c;
}

double comb2(std::size_t x) { return 0.5 * static_cast<double>(x) * (static_cast<double>(x) - 1.0); }

}  // namespace

double ari(const Partition& a, const Partition& b) {
  const Contingency c = contingency(a, b);
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : c.cells) index += comb2(count);
  for (const auto& [key, count] : c.rows) sum_rows += comb2(count);
  for (const auto& [key, count] : c.cols) sum_cols += comb2(count);
  const double total = comb2(c.n);
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;  // both trivial (one cluster or all singletons)
  return (index - expected) / (max_index - expected);
}

double nmi(const Partition& a, const Partition& b) {
  const Contingency c = contingency(a, b);
  const auto n = static_cast<double>(c.n);
  if (c.n == 0) return 0.0;
  auto entropy = [n](const std::map<int, std::size_t>& counts) {
    double h = 0.0;
    for (const auto& [key, count] : counts) {
      const double p = static_cast<double>(count) / n;
      h -= p * std::log(p);
    }
    return h;
  };
  const double ha = entropy(c.rows);
  const double hb = entropy(c.cols);
  if (ha <= 0.0 && hb <= 0.0) return 1.0;  // both single-cluster: identical
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, count] : c.cells) {
    const double nij = static_cast<double>(count);
    const double ai = static_cast<double>(c.rows.at(key.first));
    const double bj = static_cast<double>(c.cols.at(key.second));
    mi += nij / n * std::log(n * nij / (ai * bj));
  }
  return std::clamp(mi / (0.5 * (ha + hb)), 0.0, 1.0);
}

ClusterStats cluster_stats(const Partition& p) {
  p.validate();
  ClusterStats s;
  s.k = static_cast<std::size_t>(p.k);
  std::vector<std::size_t> sizes(s.k, 0);
  for (const int label : p.labels) ++sizes[static_cast<std::size_t>(label - 1)];
  s.min_size = *std::min_element(sizes.begin(), sizes.end());
  s.max_size = *std::max_element(sizes.begin(), sizes.end());
  s.mean_size = static_cast<double>(p.size()) / static_cast<double>(s.k);
  s.n_singletons = static_cast<std::size_t>(std::count(sizes.begin(), sizes.end(), std::size_t{1}));
  s.singleton_pct = 100.0 * static_cast<double>(s.n_singletons) / static_cast<double>(s.k);
  return s;
}

std::optional<double> error_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("error_correlation: length mismatch");
  if (a.size() < 2) throw DataError("error_correlation: need at least two entries");
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace tmcf
