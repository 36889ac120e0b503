#include <algorithm>
#include <cmath>
#include <string>

#include "tmcf/errors.hpp"
#include "tmcf/eval.hpp"

namespace tmcf {

KneeResult kneedle(std::span<const double> x, std::span<const double> y, double sensitivity) {
  if (x.size() != y.size()) throw DataError("kneedle: x and y lengths differ");
  if (x.size() < 3) throw DataError("kneedle: need at least 3 points, got " + std::to_string(x.size()));
  const std::size_t n = x.size();

  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double xr = *xmax - *xmin;
  const double yr = *ymax - *ymin;

  KneeResult result;
  result.index = static_cast<std::size_t>(std::distance(y.begin(), ymin));
  result.k = static_cast<std::size_t>(std::llround(x[result.index]));
  result.difference.assign(n, 0.0);
  if (xr <= 0.0 || yr <= 0.0) return result;

  // Decreasing curves are flipped vertically so the knee sits on an
  // increasing concave curve.
  const bool decreasing = y.front() > y.back();
  std::vector<double> xn(n);
  for (std::size_t i = 0; i < n; ++i) {
    xn[i] = (x[i] - *xmin) / xr;
    double yn = (y[i] - *ymin) / yr;
    if (decreasing) yn = 1.0 - yn;
    result.difference[i] = yn - xn[i];
  }
  const auto& yd = result.difference;

  double mean_step = 0.0;
  for (std::size_t i = 1; i < n; ++i) mean_step += xn[i] - xn[i - 1];
  mean_step /= static_cast<double>(n - 1);

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (yd[i] > yd[i - 1] && yd[i] >= yd[i + 1]) maxima.push_back(i);
  }

  bool found = false;
  std::size_t best = 0;
  for (std::size_t idx = 0; idx < maxima.size(); ++idx) {
    const std::size_t lmx = maxima[idx];
    const double threshold = yd[lmx] - sensitivity * mean_step;
    const std::size_t stop = idx + 1 < maxima.size() ? maxima[idx + 1] : n;
    bool confirmed = false;
    for (std::size_t j = lmx + 1; j < stop; ++j) {
      if (yd[j] < threshold) {
        confirmed = true;
        break;
      }
    }
    if (confirmed && (!found || yd[lmx] > yd[best])) {
      best = lmx;
      found = true;
    }
  }
  if (found) {
    result.index = best;
    result.k = static_cast<std::size_t>(std::llround(x[best]));
    result.knee_found = true;
  }
  return result;
}

KneeResult kneedle(const SweepCurve& curve) {
  std::vector<double> x(curve.k_values.begin(), curve.k_values.end());
  return kneedle(x, curve.mean_rmse);
}

}  // namespace tmcf
