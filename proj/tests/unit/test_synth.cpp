#include <doctest.h>

#include <algorithm>

#include "tmcf/errors.hpp"
#include "tmcf/repr.hpp"
#include "tmcf/synth.hpp"

using namespace tmcf;

namespace {

SynthSpec planted(std::uint64_t seed, double noise) {
  SynthSpec spec;
  spec.n_nodes = 4;
  spec.steps = 2048;
  spec.seed = seed;
  spec.groups = {{8, 24, 1.0, noise, WaveShape::Sine}, {8, 96, 1.0, noise, WaveShape::Sine}};
  return spec;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("same seed gives the same trace") {
    const auto [a, ta] = generate(planted(7, 0.05));
    const auto [b, tb] = generate(planted(7, 0.05));
    CHECK(a.values() == b.values());
    CHECK(ta.labels == tb.labels);
  }

  TEST_CASE("different seeds give different traces") {
    CHECK(generate(planted(7, 0.05)).first.values() != generate(planted(8, 0.05)).first.values());
  }

  TEST_CASE("ground truth labels follow group order") {
    const auto [tm, truth] = generate(planted(1, 0.0));
    CHECK(truth.k == 2);
    CHECK(truth.size() == 16);
    CHECK(std::count(truth.labels.begin(), truth.labels.end(), 1) == 8);
    CHECK(truth.labels.front() == 1);
    CHECK(truth.labels.back() == 2);
    CHECK_NOTHROW(truth.validate());
  }

  TEST_CASE("values are nonnegative for every shape") {
    SynthSpec spec;
    spec.n_nodes = 2;
    spec.steps = 500;
    spec.seed = 3;
    spec.groups = {{1, 24, 1.0, 0.5, WaveShape::Sine},
                   {1, 24, 1.0, 0.5, WaveShape::Square},
                   {2, 12, 2.0, 0.5, WaveShape::BurstyLognormal}};
    const auto tm = generate(spec).first;
    CHECK(std::all_of(tm.values().begin(), tm.values().end(), [](double v) { return v >= 0.0; }));
    CHECK_NOTHROW(tm.validate());
  }

  TEST_CASE("noise-free flows repeat at their period") {
    const auto tm = generate(planted(5, 0.0)).first;
    const auto flows = extract_flows(tm);
    const std::vector<std::size_t> lags{24, 96};
    const auto fast = acf_rep(flows.flow(0), lags);
    const auto slow = acf_rep(flows.flow(15), lags);
    CHECK(fast.rho[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(slow.rho[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(slow.rho[0] < 0.95);
  }

  TEST_CASE("a single group is one cluster") {
    SynthSpec spec;
    spec.n_nodes = 3;
    spec.steps = 100;
    spec.groups = {{9, 10, 1.0, 0.1, WaveShape::Sine}};
    const auto truth = generate(spec).second;
    CHECK(truth.k == 1);
    CHECK(std::all_of(truth.labels.begin(), truth.labels.end(), [](int l) { return l == 1; }));
  }

  TEST_CASE("invalid specifications are configuration errors") {
    auto spec = planted(1, 0.0);
    spec.groups[0].flow_count = 7;
    CHECK_THROWS_AS(generate(spec), ConfigError);
    spec = planted(1, 0.0);
    spec.groups[1].period_steps = 1;
    CHECK_THROWS_AS(generate(spec), ConfigError);
    spec = planted(1, -0.1);
    CHECK_THROWS_AS(generate(spec), ConfigError);
    CHECK_THROWS_AS(parse_wave_shape("triangle"), ConfigError);
  }
}
