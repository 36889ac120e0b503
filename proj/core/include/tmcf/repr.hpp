#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tmcf/dataset.hpp"

namespace tmcf {

enum class Representation { Histogram, Acf, Psd, Naive };
enum class Metric { Jsd, Euclidean };

Representation parse_representation(std::string_view name);
std::string_view to_string(Representation r);
Metric parse_metric(std::string_view name);
std::string_view to_string(Metric m);

/// Empirical pmf over equal-width bins on [0, 1].
struct HistogramRep {
  std::vector<double> pmf;
  std::vector<double> bin_edges;
};

struct AcfRep {
  std::vector<double> rho;
  std::vector<std::size_t> lags;
  bool degenerate = false;  // constant input; rho is all zeros
};

struct PsdRep {
  std::vector<double> power;  // one-sided density
  std::vector<double> freqs;  // cycles per hour
  double fs = 0.0;            // samples per hour
};

/// Welch estimator settings. The window is always Hann (periodic), each
/// segment has its mean removed, and the result is a one-sided density.
struct WelchParams {
  std::size_t segment_length = 256;  // clipped to the series length
  double overlap = 0.5;
};

/// Bins are [e_k, e_{k+1}) except the last, which is closed. Values outside
/// [0, 1] fall into the nearest edge bin.
HistogramRep histogram_rep(std::span<const double> flow, std::size_t bins = 50);

/// Jensen-Shannon divergence with base-2 logarithms; lies in [0, 1].
double jsd(std::span<const double> p, std::span<const double> q);
double jsd(const HistogramRep& p, const HistogramRep& q);

/// Pearson correlation between x[l..T) and x[0..T-l) for each lag l.
AcfRep acf_rep(std::span<const double> flow, std::span<const std::size_t> lags);

/// Every step up to 2 h, hourly from 3 h to 6 h, then 12 h and 24 h.
std::vector<std::size_t> default_lags(std::uint32_t interval_seconds);

/// Samples per hour for a sampling period.
double samples_per_hour(std::uint32_t interval_seconds);

PsdRep psd_rep(std::span<const double> flow, double fs, const WelchParams& params = {});

double euclidean(std::span<const double> a, std::span<const double> b);

struct ReprOptions {
  Representation kind = Representation::Histogram;
  std::size_t bins = 50;
  std::vector<std::size_t> lags;  // empty: default_lags(interval)
  double fs = 0.0;                // 0: samples_per_hour(interval)
  WelchParams welch;
  bool psd_unit_mass = true;
};

/// One feature vector per flow plus the axis it is indexed by (bin centres,
/// lags or frequencies).
struct ReprMatrix {
  Representation kind = Representation::Histogram;
  std::vector<std::vector<double>> features;
  std::vector<double> axis;
  std::vector<bool> degenerate;

  std::size_t size() const noexcept { return features.size(); }
};

/// Computes the representation of every flow over `range`.
ReprMatrix represent(const FlowSet& flows, TimeRange range, std::uint32_t interval_seconds,
                     const ReprOptions& options);

class DissimilarityMatrix {
 public:
  DissimilarityMatrix() = default;
  DissimilarityMatrix(std::size_t n, Metric metric);
  DissimilarityMatrix(std::size_t n, Metric metric, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  Metric metric() const noexcept { return metric_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  const std::vector<double>& values() const noexcept { return d_; }

  /// Throws DataError unless symmetric, zero-diagonal, nonnegative and, for
  /// JSD, bounded by 1.
  void validate(double tolerance = 1e-12) const;

 private:
  std::size_t n_ = 0;
  Metric metric_ = Metric::Euclidean;
  std::vector<double> d_;
};

DissimilarityMatrix pairwise_dissimilarity(const ReprMatrix& reps, Metric metric);

/// The pairing used throughout: histogram/JSD, ACF and PSD/Euclidean.
Metric default_metric(Representation r);

}  // namespace tmcf
