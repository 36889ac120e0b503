#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "tmcf/errors.hpp"
#include "tmcf/repr.hpp"

using namespace tmcf;

namespace {

std::vector<double> sine(std::size_t n, double period, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = std::sin(2.0 * std::numbers::pi * (static_cast<double>(t) + phase) / period);
  }
  return x;
}

std::vector<double> white(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

std::vector<double> random_pmf(std::size_t bins, std::mt19937_64& rng, bool sparse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(bins);
  double s = 0.0;
  for (double& v : p) {
    v = sparse && u(rng) < 0.4 ? 0.0 : u(rng);
    s += v;
  }
  if (s == 0.0) {
    p[0] = 1.0;
    s = 1.0;
  }
  for (double& v : p) v /= s;
  return p;
}

}  // namespace

TEST_SUITE("repr") {
  TEST_CASE("histogram bin assignment") {
    const std::vector<double> x{0.0, 0.5, 1.0, 0.25};
    const auto h = histogram_rep(x, 4);
    CHECK(h.bin_edges.size() == 5);
    // 0 -> bin 0, 0.25 -> bin 1 (left-closed), 0.5 -> bin 2, 1.0 -> last bin (closed)
    CHECK(h.pmf[0] == 0.25);
    CHECK(h.pmf[1] == 0.25);
    CHECK(h.pmf[2] == 0.25);
    CHECK(h.pmf[3] == 0.25);
  }

  TEST_CASE("out-of-range values fall into the edge bins") {
    const std::vector<double> x{-0.3, 1.7, 0.99};
    const auto h = histogram_rep(x, 50);
    CHECK(h.pmf.front() == doctest::Approx(1.0 / 3.0));
    CHECK(h.pmf.back() == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("histogram edges are exact for every bin boundary") {
    std::vector<double> x;
    for (std::size_t k = 0; k < 50; ++k) x.push_back(static_cast<double>(k) / 50.0);
    const auto h = histogram_rep(x, 50);
    for (const double p : h.pmf) CHECK(p == doctest::Approx(1.0 / 50.0));
  }

  TEST_CASE("jsd hand value") {
    const std::vector<double> p{0.5, 0.5};
    const std::vector<double> q{1.0, 0.0};
    // 0.5 * (0.5 log2(0.5/0.75) + 0.5 log2(0.5/0.25)) + 0.5 * log2(1/0.75)
    const double expected = 0.5 * std::log2(4.0 / 3.0) + 0.25 * std::log2(2.0 / 3.0) + 0.25;
    CHECK(jsd(p, q) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(jsd(p, q) == doctest::Approx(0.3113).epsilon(1e-4));
  }

  TEST_CASE("jsd matches the closed-form oracle and its axioms") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = random_pmf(50, rng, trial % 2 == 0);
      const auto q = random_pmf(50, rng, trial % 3 == 0);
      const double d = jsd(p, q);
      CHECK(d == doctest::Approx(oracle::jsd_closed_form(p, q)).epsilon(1e-12));
      CHECK(d == jsd(q, p));
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      CHECK(jsd(p, p) == 0.0);
    }
    const std::vector<double> a{1.0, 0.0};
    const std::vector<double> b{0.0, 1.0};
    CHECK(jsd(a, b) == doctest::Approx(1.0));
    const std::vector<double> three{1.0, 0.0, 0.0};
    CHECK_THROWS_AS(jsd(a, three), DataError);
  }

  TEST_CASE("acf of a sine is one at its period") {
    const auto x = sine(2000, 24.0, 0.3);
    const std::vector<std::size_t> lags{6, 12, 24, 48};
    const auto r = acf_rep(x, lags);
    CHECK_FALSE(r.degenerate);
    CHECK(r.rho[0] == doctest::Approx(0.0).epsilon(1e-2));
    CHECK(r.rho[1] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(r.rho[2] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.rho[3] == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("acf is invariant to positive affine maps") {
    auto x = white(500, 2);
    for (std::size_t t = 1; t < x.size(); ++t) x[t] += 0.6 * x[t - 1];
    auto y = x;
    for (double& v : y) v = 3.5 * v + 12.0;
    const auto lags = default_lags(300);
    const auto a = acf_rep(x, lags);
    const auto b = acf_rep(y, lags);
    for (std::size_t i = 0; i < lags.size(); ++i) CHECK(a.rho[i] == doctest::Approx(b.rho[i]).epsilon(1e-10));
    CHECK(a.rho[0] == doctest::Approx(0.6).epsilon(0.1));
  }

  TEST_CASE("acf of white noise stays near zero") {
    const auto x = white(4000, 3);
    const auto r = acf_rep(x, default_lags(300));
    for (const double v : r.rho) CHECK(std::abs(v) < 4.0 / std::sqrt(4000.0));
  }

  TEST_CASE("constant flows are degenerate") {
    const std::vector<double> x(100, 2.0);
    const std::vector<std::size_t> lags{1, 2};
    const auto r = acf_rep(x, lags);
    CHECK(r.degenerate);
    CHECK(r.rho == std::vector<double>{0.0, 0.0});
    const std::vector<std::size_t> too_long{100};
    CHECK_THROWS_AS(acf_rep(x, too_long), DataError);
  }

  TEST_CASE("default lag sets") {
    const auto five_min = default_lags(300);
    CHECK(five_min.size() == 30);
    CHECK(five_min[23] == 24);
    CHECK(five_min.back() == 288);
    const auto quarter = default_lags(900);
    CHECK(quarter == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 7, 8, 12, 16, 20, 24, 48, 96});
    const auto hourly = default_lags(3600);
    CHECK(hourly == std::vector<std::size_t>{1, 2, 3, 4, 5, 6, 12, 24});
    CHECK_THROWS_AS(default_lags(7), ConfigError);
  }

  TEST_CASE("welch matches a direct dft") {
    auto x = white(700, 4);
    const auto s = sine(700, 24.0);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] += 2.0 * s[t] + 5.0;
    const WelchParams params{128, 0.5};
    const auto psd = psd_rep(x, 12.0, params);
    const auto ref = oracle::direct_welch(x, 12.0, 128, 0.5);
    REQUIRE(psd.power.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(psd.power[k] == doctest::Approx(ref[k]).epsilon(1e-9));
    CHECK(psd.freqs[1] == doctest::Approx(12.0 / 128.0));
  }

  TEST_CASE("welch odd segment length matches a direct dft") {
    const auto x = white(301, 5);
    const WelchParams params{75, 0.5};
    const auto psd = psd_rep(x, 4.0, params);
    const auto ref = oracle::direct_welch(x, 4.0, 75, 0.5);
    REQUIRE(psd.power.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(psd.power[k] == doctest::Approx(ref[k]).epsilon(1e-9));
  }

  TEST_CASE("welch agrees with frozen reference values for a daily sine") {
    // Reference from scipy.signal.welch(x, fs=12, nperseg=256) with its
    // defaults (hann, 50 % overlap, constant detrend, density).
    const auto x = sine(4096, 288.0);
    const auto psd = psd_rep(x, 12.0);
    CHECK(psd.power[0] == doctest::Approx(1.53547647).epsilon(1e-6));
    CHECK(psd.power[1] == doctest::Approx(6.16299451).epsilon(1e-6));
    std::size_t peak = 0;
    for (std::size_t k = 1; k < psd.power.size(); ++k) {
      if (psd.power[k] > psd.power[peak]) peak = k;
    }
    CHECK(peak == 1);
  }

  TEST_CASE("psd ignores additive offsets and handles constant input") {
    const auto x = white(600, 6);
    auto shifted = x;
    for (double& v : shifted) v += 100.0;
    const auto a = psd_rep(x, 12.0);
    const auto b = psd_rep(shifted, 12.0);
    for (std::size_t k = 0; k < a.power.size(); ++k) CHECK(a.power[k] == doctest::Approx(b.power[k]).epsilon(1e-8));

    const std::vector<double> flat(600, 3.0);
    const auto c = psd_rep(flat, 12.0);
    for (const double p : c.power) CHECK(p == doctest::Approx(0.0));
  }

  TEST_CASE("represent is equivariant under flow permutation") {
    FlowSet flows(2, 400);
    for (std::size_t m = 0; m < 4; ++m) {
      const auto x = white(400, 20 + m);
      for (std::size_t t = 0; t < 400; ++t) flows(m, t) = 0.5 + 0.1 * x[t] + 0.2 * static_cast<double>(m % 2);
    }
    FlowSet swapped = flows;
    for (std::size_t t = 0; t < 400; ++t) std::swap(swapped(0, t), swapped(3, t));
    for (const auto kind : {Representation::Histogram, Representation::Acf, Representation::Psd}) {
      ReprOptions opts;
      opts.kind = kind;
      const auto a = represent(flows, {0, 400}, 300, opts);
      const auto b = represent(swapped, {0, 400}, 300, opts);
      CHECK(a.features[0] == b.features[3]);
      CHECK(a.features[3] == b.features[0]);
      CHECK(a.features[1] == b.features[1]);
      const auto da = pairwise_dissimilarity(a, default_metric(kind));
      const auto db = pairwise_dissimilarity(b, default_metric(kind));
      CHECK_NOTHROW(da.validate());
      CHECK(da(0, 1) == doctest::Approx(db(3, 1)));
    }
  }

  TEST_CASE("unit-mass psd features sum to one") {
    FlowSet flows(1, 512);
    const auto x = white(512, 8);
    for (std::size_t t = 0; t < 512; ++t) flows(0, t) = x[t];
    ReprOptions opts;
    opts.kind = Representation::Psd;
    const auto r = represent(flows, {0, 512}, 300, opts);
    double total = 0.0;
    for (const double p : r.features[0]) total += p;
    CHECK(total == doctest::Approx(1.0));
  }

  TEST_CASE("default lags are cut to the region, explicit lags are not") {
    FlowSet flows(1, 300);
    const auto x = white(300, 9);
    for (std::size_t t = 0; t < 300; ++t) flows(0, t) = x[t];
    ReprOptions opts;
    opts.kind = Representation::Acf;
    const auto r = represent(flows, {0, 288}, 300, opts);
    CHECK(r.axis.size() == 29);
    CHECK(r.axis.back() == 144.0);
    CHECK_THROWS_AS(represent(flows, {0, 1}, 300, opts), DataError);
    opts.lags = {1, 288};
    CHECK_THROWS_AS(represent(flows, {0, 288}, 300, opts), DataError);
  }

  TEST_CASE("jsd is rejected for non-histogram representations") {
    FlowSet flows(1, 100);
    for (std::size_t t = 0; t < 100; ++t) flows(0, t) = static_cast<double>(t % 7);
    ReprOptions opts;
    opts.kind = Representation::Acf;
    opts.lags = {1, 2, 3};
    const auto r = represent(flows, {0, 100}, 300, opts);
    CHECK_THROWS_AS(pairwise_dissimilarity(r, Metric::Jsd), ConfigError);
  }
}
