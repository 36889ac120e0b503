// Welch power spectral density on top of FFTW's real-to-complex transform.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "tmcf/errors.hpp"
#include "tmcf/repr.hpp"

namespace tmcf {
namespace {

// FFTW planning is not thread-safe; execution with a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

PsdRep psd_rep(std::span<const double> flow, double fs, const WelchParams& params) {
  if (!(fs > 0.0)) throw ConfigError("psd: sampling frequency must be positive");
  if (!(params.overlap >= 0.0 && params.overlap < 1.0)) throw ConfigError("psd: overlap must lie in [0, 1)");
  if (params.segment_length < 2) throw ConfigError("psd: segment length must be at least 2");
  if (flow.size() < 2) throw DataError("psd: series shorter than one segment");

  const std::size_t seg = std::min(params.segment_length, flow.size());
  const auto noverlap = static_cast<std::size_t>(std::floor(params.overlap * static_cast<double>(seg)));
  const std::size_t hop = seg - noverlap;
  const std::size_t n_segments = (flow.size() - seg) / hop + 1;
  const std::size_t n_bins = seg / 2 + 1;

  std::vector<double> window(seg);
  double window_power = 0.0;
  for (std::size_t n = 0; n < seg; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(seg));
    window_power += window[n] * window[n];
  }

  std::vector<double> buffer(seg);
  std::vector<std::complex<double>> spectrum(n_bins);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(seg), buffer.data(),
                                    reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_ESTIMATE));
  }
  if (!plan) throw NumericalError("psd: FFT planning failed");

  PsdRep rep;
  rep.fs = fs;
  rep.power.assign(n_bins, 0.0);
  rep.freqs.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) rep.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(seg);

  for (std::size_t s = 0; s < n_segments; ++s) {
    const auto segment = flow.subspan(s * hop, seg);
    double mean = 0.0;
    for (const double v : segment) mean += v;
    mean /= static_cast<double>(seg);
    for (std::size_t n = 0; n < seg; ++n) buffer[n] = (segment[n] - mean) * window[n];
    fftw_execute(plan.get());
    for (std::size_t k = 0; k < n_bins; ++k) rep.power[k] += std::norm(spectrum[k]);
  }

  const double scale = 1.0 / (fs * window_power * static_cast<double>(n_segments));
  for (std::size_t k = 0; k < n_bins; ++k) {
    const bool unpaired = k == 0 || (seg % 2 == 0 && k == n_bins - 1);
    rep.power[k] *= scale * (unpaired ? 1.0 : 2.0);
  }
  return rep;
}

}  // namespace tmcf
