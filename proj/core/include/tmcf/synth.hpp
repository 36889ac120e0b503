#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/dataset.hpp"

namespace tmcf {

enum class WaveShape { Sine, Square, BurstyLognormal };

WaveShape parse_wave_shape(std::string_view name);
std::string_view to_string(WaveShape shape);

/// One block of flows sharing a generator.
struct FlowGroup {
  std::size_t flow_count = 0;
  std::size_t period_steps = 24;
  double amplitude = 1.0;
  /// Gaussian noise standard deviation as a multiple of `amplitude`.
  double noise_std = 0.0;
  WaveShape shape = WaveShape::Sine;
};

struct SynthSpec {
  std::size_t n_nodes = 4;
  std::size_t steps = 2048;
  std::uint32_t interval_seconds = 300;
  std::vector<FlowGroup> groups;
  std::uint64_t seed = 0;

  /// Throws ConfigError on invariant violations.
  void validate() const;
};

/// Flows are assigned to groups in index order (group 0 takes flows
/// 0..count0-1 and so on). Each flow gets its own random phase; bursty flows
/// draw lognormal marks on a Bernoulli support. Values are truncated at 0.
std::pair<TmSeries, Partition> generate(const SynthSpec& spec);

}  // namespace tmcf
