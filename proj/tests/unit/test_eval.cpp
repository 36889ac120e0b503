#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tmcf/errors.hpp"
#include "tmcf/eval.hpp"
#include "tmcf/sweep.hpp"
#include "tmcf/synth.hpp"

using namespace tmcf;

namespace {

Partition labels(std::vector<int> l) { return Partition::from_labels(l, "test"); }

std::vector<int> random_labels(std::size_t n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(1, k);
  std::vector<int> out(n);
  for (int& v : out) v = pick(rng);
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
    sab += a[i] * b[i];
  }
  return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("rmse examples") {
    const std::vector<double> truth{0.0, 0.0};
    const std::vector<double> pred{5.0, 0.0};
    CHECK(rmse(truth, pred) == doctest::Approx(std::sqrt(12.5)));
    CHECK(rmse(truth, truth) == 0.0);
    const std::vector<double> short_pred{1.0};
    CHECK_THROWS_AS(rmse(truth, short_pred), DataError);
  }

  TEST_CASE("physical units") {
    // 1.25 MB in five minutes is 10 Mbit over 300 s.
    CHECK(1.25e6 * mbps_factor(TrafficUnits::BytesPerInterval, 300) == doctest::Approx(1.0 / 30.0));
    CHECK(mbps_factor(TrafficUnits::BytesPerInterval, 300) / mbps_factor(TrafficUnits::BytesPerInterval, 900) ==
          doctest::Approx(3.0));
    CHECK(mbps_factor(TrafficUnits::BitsPerInterval, 1) == doctest::Approx(1e-6));
    CHECK(mbps_factor(TrafficUnits::Mbps, 900) == 1.0);

    TmSeries a(1, 2, 300), b(1, 2, 300);
    b.at(0, 0, 0) = 1.25e6;
    b.at(1, 0, 0) = 1.25e6;
    CHECK(rmse_physical(a, b) == doctest::Approx(1.0 / 30.0));
  }

  TEST_CASE("pooled rmse equals the root mean of squared per-flow errors") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> truth(60), pred(60);
    for (std::size_t i = 0; i < 60; ++i) {
      truth[i] = g(rng);
      pred[i] = g(rng);
    }
    const auto per_flow = per_flow_rmse(truth, pred, 4);
    REQUIRE(per_flow.size() == 4);
    double sq = 0.0;
    for (const double e : per_flow) sq += e * e;
    CHECK(std::sqrt(sq / 4.0) == doctest::Approx(rmse(truth, pred)));
  }

  TEST_CASE("ari and nmi examples") {
    const auto a = labels({1, 1, 2, 2});
    const auto b = labels({1, 2, 1, 2});
    CHECK(ari(a, b) == doctest::Approx(-0.5));
    CHECK(nmi(a, b) == doctest::Approx(0.0));
    CHECK(ari(a, a) == 1.0);
    CHECK(nmi(a, a) == doctest::Approx(1.0));
    CHECK(ari(a, labels({2, 2, 1, 1})) == 1.0);
    // A single cluster carries no information.
    CHECK(nmi(a, labels({1, 1, 1, 1})) == 0.0);
    CHECK(nmi(labels({1, 1, 1}), labels({2, 2, 2})) == 1.0);
  }

  TEST_CASE("ari matches pair counting") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 11);
      const auto ra = random_labels(n, 1 + trial % 4, rng);
      const auto rb = random_labels(n, 1 + trial % 5, rng);
      const auto a = labels(ra);
      const auto b = labels(rb);
      CHECK(std::abs(ari(a, b) - oracle::pair_counting_ari(a.labels, b.labels)) < 1e-12);
      CHECK(ari(a, b) == doctest::Approx(ari(b, a)).epsilon(1e-14));
      CHECK(nmi(a, b) == doctest::Approx(nmi(b, a)).epsilon(1e-14));
    }
  }

  TEST_CASE("ari of independent random partitions averages zero") {
    std::mt19937_64 rng(29);
    double total = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      total += ari(labels(random_labels(100, 5, rng)), labels(random_labels(100, 5, rng)));
    }
    CHECK(std::abs(total / 200.0) < 0.05);
  }

  TEST_CASE("nmi matches entropies computed directly") {
    // {1,1,2,2,2} vs {1,1,1,2,2}: contingency [[2,0],[1,2]].
    const auto a = labels({1, 1, 2, 2, 2});
    const auto b = labels({1, 1, 1, 2, 2});
    const double ha = -(0.4 * std::log(0.4) + 0.6 * std::log(0.6));
    const double mi = 0.4 * std::log(0.4 / (0.4 * 0.6)) + 0.2 * std::log(0.2 / (0.6 * 0.6)) +
                      0.4 * std::log(0.4 / (0.6 * 0.4));
    CHECK(nmi(a, b) == doctest::Approx(mi / ha).epsilon(1e-12));
  }

  TEST_CASE("cluster statistics") {
    const auto s = cluster_stats(labels({1, 1, 1, 2, 3}));
    CHECK(s.k == 3);
    CHECK(s.min_size == 1);
    CHECK(s.max_size == 3);
    CHECK(s.mean_size == doctest::Approx(5.0 / 3.0));
    CHECK(s.n_singletons == 2);
    CHECK(s.singleton_pct == doctest::Approx(200.0 / 3.0));
  }

  TEST_CASE("error correlation") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b{1.1, 2.3, 2.9, 4.4, 4.8};
    REQUIRE(error_correlation(a, b).has_value());
    CHECK(*error_correlation(a, b) == doctest::Approx(pearson(a, b)).epsilon(1e-12));
    const std::vector<double> flat(5, 2.0);
    CHECK_FALSE(error_correlation(a, flat).has_value());
  }

  TEST_CASE("kneedle finds the corner of a two-piece curve") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<double> y{1.0, 0.2, 0.18, 0.16, 0.14, 0.12, 0.10, 0.08, 0.06, 0.04};
    const auto knee = kneedle(x, y);
    CHECK(knee.knee_found);
    CHECK(knee.k == 2);
    CHECK(static_cast<int>(knee.index) == oracle::kneedle_difference_argmax(x, y));
  }

  TEST_CASE("kneedle reports no knee on a straight line") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> y;
    for (const double v : x) y.push_back(20.0 - 2.0 * v);
    const auto knee = kneedle(x, y);
    CHECK_FALSE(knee.knee_found);
    CHECK(knee.k == 10);  // falls back to the argmin
  }

  TEST_CASE("kneedle on 1/k follows the difference curve") {
    std::vector<double> x, y;
    for (int k = 1; k <= 10; ++k) {
      x.push_back(k);
      y.push_back(1.0 / k);
    }
    const auto knee = kneedle(x, y);
    const int want = oracle::kneedle_difference_argmax(x, y);
    REQUIRE(want >= 0);
    CHECK(knee.knee_found);
    CHECK(knee.index == static_cast<std::size_t>(want));
    CHECK(knee.k == 3);
    CHECK(knee.difference[2] == doctest::Approx(1.0 - (1.0 / 3.0 - 0.1) / 0.9 - 2.0 / 9.0));
  }

  TEST_CASE("kneedle input checks") {
    const std::vector<double> two{1, 2};
    CHECK_THROWS_AS(kneedle(two, two), DataError);
  }

  TEST_CASE("small sweep is consistent and independent of workers") {
    SynthSpec spec;
    spec.n_nodes = 2;
    spec.steps = 300;
    spec.seed = 2;
    spec.groups = {{2, 12, 1.0, 0.05, WaveShape::Sine}, {2, 30, 1.0, 0.05, WaveShape::Sine}};
    const auto trace = prepare_trace(generate(spec).first, {});
    SweepOptions opts;
    opts.repr.kind = Representation::Acf;
    opts.repr.lags = {1, 2, 3, 6, 12};
    opts.k_grid = {1, 2, 4};
    opts.repetitions = 2;
    opts.base = GruConfig::desk();
    opts.base.hidden_size = 4;
    opts.base.epochs = 2;
    opts.workers = 1;
    const auto serial = k_sweep(trace, opts);
    opts.workers = 4;
    const auto parallel = k_sweep(trace, opts);
    CHECK(serial.curve.k_values == std::vector<std::size_t>{1, 2, 4});
    CHECK(serial.points.size() == 6);
    CHECK(serial.curve.mean_rmse == parallel.curve.mean_rmse);
    CHECK(serial.curve.rmse_std == parallel.curve.rmse_std);
    const double mean_k2 = 0.5 * (serial.points[2].rmse_normalized + serial.points[3].rmse_normalized);
    CHECK(serial.curve.mean_rmse[1] == doctest::Approx(mean_k2));
    CHECK(default_k_grid(144) == std::vector<std::size_t>{1, 11, 21, 31, 41, 51, 61, 71, 81, 91, 101, 111, 121, 131,
                                                          141, 144});
  }
}
