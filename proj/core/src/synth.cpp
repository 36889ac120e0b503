#include "tmcf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tmcf/errors.hpp"

namespace tmcf {

WaveShape parse_wave_shape(std::string_view name) {
  if (name == "sine") return WaveShape::Sine;
  if (name == "square") return WaveShape::Square;
  if (name == "bursty-lognormal" || name == "bursty") return WaveShape::BurstyLognormal;
  throw ConfigError("unknown wave shape '" + std::string(name) + "'");
}

std::string_view to_string(WaveShape shape) {
  switch (shape) {
    case WaveShape::Sine:
      return "sine";
    case WaveShape::Square:
      return "square";
    case WaveShape::BurstyLognormal:
      return "bursty-lognormal";
  }
  return "sine";
}

void SynthSpec::validate() const {
  if (n_nodes == 0) throw ConfigError("synth: n_nodes must be positive");
  if (steps < 2) throw ConfigError("synth: steps must be at least 2");
  if (interval_seconds == 0) throw ConfigError("synth: interval_seconds must be positive");
  if (groups.empty()) throw ConfigError("synth: at least one group is required");
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.flow_count == 0) throw ConfigError("synth: group flow_count must be positive");
    if (g.period_steps < 2) throw ConfigError("synth: period_steps must be at least 2");
    if (!(g.amplitude > 0.0)) throw ConfigError("synth: amplitude must be positive");
    if (!(g.noise_std >= 0.0)) throw ConfigError("synth: noise_std must be nonnegative");
    total += g.flow_count;
  }
  if (total != n_nodes * n_nodes) {
    throw ConfigError("synth: group flow counts sum to " + std::to_string(total) + ", expected N^2 = " +
                      std::to_string(n_nodes * n_nodes));
  }
}

std::pair<TmSeries, Partition> generate(const SynthSpec& spec) {
  spec.validate();
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kBurstRate = 0.1;
  constexpr double kSquareSwing = 0.8;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TmSeries tm(spec.n_nodes, spec.steps, spec.interval_seconds);
  std::vector<int> labels;
  labels.reserve(spec.n_nodes * spec.n_nodes);

  std::size_t m = 0;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const FlowGroup& group = spec.groups[g];
    const auto period = static_cast<double>(group.period_steps);
    for (std::size_t f = 0; f < group.flow_count; ++f, ++m) {
      labels.push_back(static_cast<int>(g) + 1);
      const double phase = unit(rng) * period;
      const std::size_t i = m / spec.n_nodes;
      const std::size_t j = m % spec.n_nodes;
      for (std::size_t t = 0; t < spec.steps; ++t) {
        const double wave = std::sin(kTwoPi * (static_cast<double>(t) + phase) / period);
        double v = 0.0;
        switch (group.shape) {
          case WaveShape::Sine:
            v = group.amplitude * (1.0 + wave);
            break;
          case WaveShape::Square:
            v = group.amplitude * (1.0 + kSquareSwing * (wave >= 0.0 ? 1.0 : -1.0));
            break;
          case WaveShape::BurstyLognormal: {
            const double p = kBurstRate * (1.0 + wave);
            const bool burst = unit(rng) < p;
            const double mark = std::exp(gauss(rng));
            v = burst ? group.amplitude * mark : 0.0;
            break;
          }
        }
        if (group.noise_std > 0.0) v += group.noise_std * group.amplitude * gauss(rng);
        tm.at(t, i, j) = std::max(v, 0.0);
      }
    }
  }

  Partition truth;
  truth.labels = std::move(labels);
  truth.k = static_cast<int>(spec.groups.size());
  truth.method = "ground_truth";
  truth.seed = spec.seed;
  return {std::move(tm), std::move(truth)};
}

}  // namespace tmcf
