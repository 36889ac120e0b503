#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tmcf/errors.hpp"
#include "tmcf/eval.hpp"
#include "tmcf/predict.hpp"
#include "tmcf/sweep.hpp"
#include "tmcf/synth.hpp"

using namespace tmcf;

namespace {

PreparedTrace small_trace() {
  SynthSpec spec;
  spec.n_nodes = 2;
  spec.steps = 300;
  spec.seed = 4;
  spec.groups = {{2, 12, 1.0, 0.05, WaveShape::Sine}, {2, 30, 2.0, 0.05, WaveShape::Sine}};
  return prepare_trace(generate(spec).first, {});
}

GruConfig quick() {
  GruConfig cfg = GruConfig::desk();
  cfg.hidden_size = 4;
  cfg.epochs = 3;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST_SUITE("predict") {
  TEST_CASE("one model per cluster at both extremes") {
    const auto trace = small_trace();
    const Partition em = Partition::from_labels({1, 1, 1, 1}, "em");
    const auto one = train_partitioned(em, trace.normalized, quick(), trace.splits, trace.window_length);
    REQUIRE(one.size() == 1);
    CHECK(one[0].model.input_size() == 4);
    CHECK(one[0].flows == std::vector<std::size_t>{0, 1, 2, 3});

    const Partition local = Partition::from_labels({1, 2, 3, 4}, "local");
    const auto many = train_partitioned(local, trace.normalized, quick(), trace.splits, trace.window_length);
    REQUIRE(many.size() == 4);
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(many[c].cluster_id == static_cast<int>(c) + 1);
      CHECK(many[c].model.input_size() == 1);
      CHECK(many[c].report.seed == mix_seed(1, c + 1));
    }
  }

  TEST_CASE("forecast covers every flow and target step") {
    const auto trace = small_trace();
    const Partition p = Partition::from_labels({1, 2, 1, 2}, "p");
    const auto models = train_partitioned(p, trace.normalized, quick(), trace.splits, trace.window_length);
    const auto fc = predict_tm(models, p, trace.normalized, trace.splits.test, trace.window_length, trace.scale,
                               trace.interval_seconds());
    CHECK(fc.first_step == trace.splits.test.begin + trace.window_length - 1);
    CHECK(fc.steps == trace.splits.test.size() - trace.window_length + 1);
    CHECK(fc.predicted.steps() == fc.steps);
    CHECK(std::all_of(fc.normalized.begin(), fc.normalized.end(), [](double v) { return std::isfinite(v); }));
    // Denormalisation is the per-flow inverse of the training scale.
    CHECK(fc.predicted.step(0)[2] == doctest::Approx(denormalize_value(fc.normalized_at(0, 2), trace.scale, 2)));
  }

  TEST_CASE("model order does not change the forecast") {
    const auto trace = small_trace();
    const Partition p = Partition::from_labels({1, 2, 2, 3}, "p");
    auto models = train_partitioned(p, trace.normalized, quick(), trace.splits, trace.window_length);
    const auto a = predict_tm(models, p, trace.normalized, trace.splits.test, trace.window_length, trace.scale, 300);
    std::reverse(models.begin(), models.end());
    const auto b = predict_tm(models, p, trace.normalized, trace.splits.test, trace.window_length, trace.scale, 300);
    CHECK(a.normalized == b.normalized);
  }

  TEST_CASE("a cluster predicted twice or not at all is rejected") {
    const auto trace = small_trace();
    const Partition p = Partition::from_labels({1, 2, 1, 2}, "p");
    auto models = train_partitioned(p, trace.normalized, quick(), trace.splits, trace.window_length);
    models.pop_back();
    CHECK_THROWS_AS(
        predict_tm(models, p, trace.normalized, trace.splits.test, trace.window_length, trace.scale, 300), DataError);
  }

  TEST_CASE("a perfect forecast has zero error") {
    const auto trace = small_trace();
    Forecast fc;
    fc.first_step = trace.splits.test.begin + trace.window_length - 1;
    fc.steps = trace.splits.test.size() - trace.window_length + 1;
    fc.flow_count = 4;
    fc.normalized = window_targets(trace.normalized, trace.splits.test, trace.window_length);
    fc.predicted = observed_targets(trace.raw, trace.splits.test, trace.window_length, trace.interval_seconds());
    const auto errors = evaluate_forecast(trace, fc, TrafficUnits::BytesPerInterval);
    CHECK(errors.rmse_normalized == 0.0);
    CHECK(errors.rmse_physical == 0.0);
    CHECK(errors.test_samples == fc.steps);
  }

  TEST_CASE("window targets pick the last row of each window") {
    FlowSet flows(1, 6);
    for (std::size_t t = 0; t < 6; ++t) flows(0, t) = static_cast<double>(t);
    const auto y = window_targets(flows, {1, 6}, 3);
    CHECK(y == std::vector<double>{3.0, 4.0, 5.0});
  }

  TEST_CASE("worker count does not change trained models") {
    const auto trace = small_trace();
    const Partition p = Partition::from_labels({1, 2, 3, 4}, "p");
    const auto a = train_partitioned(p, trace.normalized, quick(), trace.splits, trace.window_length, 1);
    const auto b = train_partitioned(p, trace.normalized, quick(), trace.splits, trace.window_length, 3);
    for (std::size_t c = 0; c < a.size(); ++c) CHECK(a[c].model.parameters() == b[c].model.parameters());
  }
}
