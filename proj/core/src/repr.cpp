#include "tmcf/repr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tmcf/errors.hpp"

namespace tmcf {

Representation parse_representation(std::string_view name) {
  if (name == "histogram" || name == "hist") return Representation::Histogram;
  if (name == "acf") return Representation::Acf;
  if (name == "psd") return Representation::Psd;
  if (name == "naive") return Representation::Naive;
  throw ConfigError("unknown representation '" + std::string(name) + "'");
}

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::Histogram:
      return "histogram";
    case Representation::Acf:
      return "acf";
    case Representation::Psd:
      return "psd";
    case Representation::Naive:
      return "naive";
  }
  return "histogram";
}

Metric parse_metric(std::string_view name) {
  if (name == "jsd") return Metric::Jsd;
  if (name == "euclidean") return Metric::Euclidean;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric m) { return m == Metric::Jsd ? "jsd" : "euclidean"; }

Metric default_metric(Representation r) { return r == Representation::Histogram ? Metric::Jsd : Metric::Euclidean; }

HistogramRep histogram_rep(std::span<const double> flow, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  if (flow.empty()) throw DataError("histogram of an empty series");

  HistogramRep rep;
  rep.bin_edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) rep.bin_edges[k] = static_cast<double>(k) / static_cast<double>(bins);
  rep.pmf.assign(bins, 0.0);

  const auto last = static_cast<std::ptrdiff_t>(bins) - 1;
  for (const double v : flow) {
    std::ptrdiff_t idx = 0;
    if (v >= 1.0) {
      idx = last;
    } else if (v > 0.0) {
      idx = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(v * static_cast<double>(bins)), 0, last);
      // Settle rounding of v * bins against the stored edges.
      if (v < rep.bin_edges[idx]) --idx;
      else if (idx < last && v >= rep.bin_edges[idx + 1]) ++idx;
    }
    rep.pmf[static_cast<std::size_t>(idx)] += 1.0;
  }
  const auto n = static_cast<double>(flow.size());
  for (double& p : rep.pmf) p /= n;
  return rep;
}

double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DataError("jsd: bin count mismatch (" + std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double m = 0.5 * (p[l] + q[l]);
    if (p[l] > 0.0) kl_p += p[l] * std::log2(p[l] / m);
    if (q[l] > 0.0) kl_q += q[l] * std::log2(q[l] / m);
  }
  return std::clamp(0.5 * kl_p + 0.5 * kl_q, 0.0, 1.0);
}

double jsd(const HistogramRep& p, const HistogramRep& q) { return jsd(p.pmf, q.pmf); }

AcfRep acf_rep(std::span<const double> flow, std::span<const std::size_t> lags) {
  if (lags.empty()) throw ConfigError("acf: lag set is empty");
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] >= flow.size()) {
      throw DataError("acf: lag " + std::to_string(lags[i]) + " is not below series length " +
                      std::to_string(flow.size()));
    }
    if (i > 0 && lags[i] <= lags[i - 1]) throw ConfigError("acf: lags must be strictly increasing");
  }

  AcfRep rep;
  rep.lags.assign(lags.begin(), lags.end());
  rep.rho.assign(lags.size(), 0.0);
  const auto [lo, hi] = std::minmax_element(flow.begin(), flow.end());
  if (*lo == *hi) {
    rep.degenerate = true;
    return rep;
  }

  const std::size_t n = flow.size();
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::size_t lag = lags[i];
    const std::size_t overlap = n - lag;
    const auto lead = flow.subspan(lag, overlap);
    const auto base = flow.subspan(0, overlap);
    const double mean_lead = std::accumulate(lead.begin(), lead.end(), 0.0) / static_cast<double>(overlap);
    const double mean_base = std::accumulate(base.begin(), base.end(), 0.0) / static_cast<double>(overlap);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < overlap; ++t) {
      const double a = lead[t] - mean_lead;
      const double b = base[t] - mean_base;
      sxy += a * b;
      sxx += a * a;
      syy += b * b;
    }
    if (sxx > 0.0 && syy > 0.0) rep.rho[i] = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  }
  return rep;
}

std::vector<std::size_t> default_lags(std::uint32_t interval_seconds) {
  if (interval_seconds == 0 || 3600 % interval_seconds != 0) {
    throw ConfigError("default lags need an interval that divides one hour, got " + std::to_string(interval_seconds) +
                      " s");
  }
  const std::size_t per_hour = 3600 / interval_seconds;
  std::vector<std::size_t> lags;
  for (std::size_t l = 1; l <= 2 * per_hour; ++l) lags.push_back(l);
  for (std::size_t h = 3; h <= 6; ++h) lags.push_back(h * per_hour);
  lags.push_back(12 * per_hour);
  lags.push_back(24 * per_hour);
  return lags;
}

double samples_per_hour(std::uint32_t interval_seconds) {
  if (interval_seconds == 0) throw ConfigError("interval_seconds must be positive");
  return 3600.0 / static_cast<double>(interval_seconds);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("euclidean: feature length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

ReprMatrix represent(const FlowSet& flows, TimeRange range, std::uint32_t interval_seconds,
                     const ReprOptions& options) {
  if (range.end > flows.steps() || range.size() == 0) throw DataError("representation range is empty or out of bounds");
  ReprMatrix out;
  out.kind = options.kind;
  out.features.resize(flows.flow_count());
  out.degenerate.assign(flows.flow_count(), false);

  switch (options.kind) {
    case Representation::Histogram: {
      for (std::size_t k = 0; k < options.bins; ++k) {
        out.axis.push_back((static_cast<double>(k) + 0.5) / static_cast<double>(options.bins));
      }
      for (std::size_t m = 0; m < flows.flow_count(); ++m) {
        out.features[m] = histogram_rep(flows.flow(m).subspan(range.begin, range.size()), options.bins).pmf;
      }
      break;
    }
    case Representation::Acf: {
      auto lags = options.lags;
      if (lags.empty()) {
        // the default schedule is cut to what the region can support; explicit lags are not
        lags = default_lags(interval_seconds);
        std::erase_if(lags, [&](std::size_t k) { return k >= range.size(); });
        if (lags.empty()) throw DataError("acf: region of " + std::to_string(range.size()) + " steps is too short");
      }
      out.axis.assign(lags.begin(), lags.end());
      for (std::size_t m = 0; m < flows.flow_count(); ++m) {
        auto rep = acf_rep(flows.flow(m).subspan(range.begin, range.size()), lags);
        out.features[m] = std::move(rep.rho);
        out.degenerate[m] = rep.degenerate;
      }
      break;
    }
    case Representation::Psd: {
      const double fs = options.fs > 0.0 ? options.fs : samples_per_hour(interval_seconds);
      for (std::size_t m = 0; m < flows.flow_count(); ++m) {
        auto rep = psd_rep(flows.flow(m).subspan(range.begin, range.size()), fs, options.welch);
        if (m == 0) out.axis = rep.freqs;
        if (options.psd_unit_mass) {
          const double total = std::accumulate(rep.power.begin(), rep.power.end(), 0.0);
          if (total > 0.0) {
            for (double& p : rep.power) p /= total;
          } else {
            out.degenerate[m] = true;
          }
        }
        out.features[m] = std::move(rep.power);
      }
      break;
    }
    case Representation::Naive:
      throw ConfigError("the naive baseline has no feature representation");
  }
  return out;
}

DissimilarityMatrix::DissimilarityMatrix(std::size_t n, Metric metric) : n_(n), metric_(metric), d_(n * n, 0.0) {}

DissimilarityMatrix::DissimilarityMatrix(std::size_t n, Metric metric, std::vector<double> values)
    : n_(n), metric_(metric), d_(std::move(values)) {
  if (d_.size() != n * n) throw DataError("dissimilarity matrix must have n*n entries");
}

void DissimilarityMatrix::validate(double tolerance) const {
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0.0) throw DataError("dissimilarity diagonal must be zero (row " + std::to_string(i) + ")");
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = (*this)(i, j);
      if (!std::isfinite(v)) throw DataError("dissimilarity entry is not finite");
      if (v < 0.0) throw DataError("dissimilarity entries must be nonnegative");
      if (metric_ == Metric::Jsd && v > 1.0 + tolerance) throw DataError("JSD entry exceeds 1");
      if (std::abs(v - (*this)(j, i)) > tolerance) {
        throw DataError("dissimilarity matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) +
                        ")");
      }
    }
  }
}

DissimilarityMatrix pairwise_dissimilarity(const ReprMatrix& reps, Metric metric) {
  if (metric == Metric::Jsd && reps.kind != Representation::Histogram) {
    throw ConfigError("jsd is only defined for the histogram representation, not " +
                      std::string(to_string(reps.kind)));
  }
  const std::size_t n = reps.size();
  DissimilarityMatrix d(n, metric);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v =
          metric == Metric::Jsd ? jsd(reps.features[i], reps.features[j]) : euclidean(reps.features[i], reps.features[j]);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace tmcf
