#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tmcf/artifacts.hpp"
#include "tmcf/errors.hpp"
#include "tmcf/model_io.hpp"

using namespace tmcf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("tmcf_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("artifacts") {
  TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("partition round trip and validation") {
    TempDir dir("partition");
    Partition p = naive_partition(10, 3, 5);
    write_partition(dir.path / "p.json", p);
    const auto back = read_partition(dir.path / "p.json");
    CHECK(back.labels == p.labels);
    CHECK(back.k == 3);
    CHECK(back.seed == 5u);
    CHECK(back.method == p.method);
    CHECK_THROWS_AS(partition_from_json(R"({"labels": [1, 3], "k": 3, "method": "x"})"), DataError);
  }

  TEST_CASE("dendrogram and dissimilarity round trip") {
    TempDir dir("dendrogram");
    std::mt19937_64 rng(1);
    const auto raw = oracle::random_dissimilarity(6, rng);
    DissimilarityMatrix d(6, Metric::Jsd);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) d(i, j) = raw[i][j];
    }
    write_dissimilarity_csv(dir.path / "d.csv", d);
    const auto d2 = read_dissimilarity_csv(dir.path / "d.csv");
    CHECK(d2.metric() == Metric::Jsd);
    CHECK(d2.values() == d.values());

    const auto dg = hac(d, Linkage::Average);
    write_dendrogram_csv(dir.path / "dg.csv", dg);
    const auto dg2 = read_dendrogram_csv(dir.path / "dg.csv", Linkage::Average);
    REQUIRE(dg2.merges.size() == dg.merges.size());
    for (std::size_t s = 0; s < dg.merges.size(); ++s) {
      CHECK(dg2.merges[s].a == dg.merges[s].a);
      CHECK(dg2.merges[s].b == dg.merges[s].b);
      CHECK(dg2.merges[s].height == dg.merges[s].height);
      CHECK(dg2.merges[s].size == dg.merges[s].size);
    }
    CHECK(cut(dg2, 3).labels == cut(dg, 3).labels);
  }

  TEST_CASE("asymmetric dissimilarity files are rejected") {
    TempDir dir("asym");
    write_text(dir.path / "d.csv", "# metric=euclidean\n0,1\n2,0\n");
    CHECK_THROWS_AS(read_dissimilarity_csv(dir.path / "d.csv"), DataError);
  }

  TEST_CASE("sweep and per-flow csv round trip") {
    TempDir dir("sweep");
    SweepCurve c;
    c.k_values = {1, 11, 16};
    c.mean_rmse = {0.3, 0.1 + 0.2, 0.05};
    c.rmse_std = {0.01, 0.02, 0.0};
    c.mean_runtime_seconds = {1.5, 2.5, 3.5};
    write_sweep_csv(dir.path / "s.csv", c);
    const auto back = read_sweep_csv(dir.path / "s.csv");
    CHECK(back.k_values == c.k_values);
    CHECK(back.mean_rmse == c.mean_rmse);
    CHECK(back.rmse_std == c.rmse_std);

    write_per_flow_csv(dir.path / "f.csv", 2, {0.1, 0.2, 0.3, 0.4}, {1.0, 2.0, 3.0, 4.0});
    CHECK(read_per_flow_csv(dir.path / "f.csv", "rmse_normalized") == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK(read_per_flow_csv(dir.path / "f.csv", "rmse_mbps") == std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS(read_per_flow_csv(dir.path / "f.csv", "rmse_bogus"));
  }

  TEST_CASE("model file round trip is exact") {
    TempDir dir("model");
    ClusterModel cm;
    cm.cluster_id = 3;
    cm.flows = {1, 4, 7};
    cm.model = GruModel(3, 5, 3);
    cm.model.init_uniform(42);
    cm.report.seed = 42;
    save_model(dir.path / "m.bin", cm, "desk");
    const auto loaded = load_model(dir.path / "m.bin");
    CHECK(loaded.profile == "desk");
    CHECK(loaded.model.cluster_id == 3);
    CHECK(loaded.model.flows == cm.flows);
    CHECK(loaded.model.model.hidden_size() == 5);
    CHECK(loaded.model.model.parameters() == cm.model.parameters());
  }

  TEST_CASE("corrupt model files are data errors") {
    TempDir dir("badmodel");
    write_text(dir.path / "bad.bin", "NOTAMODELFILE-------------------");
    CHECK_THROWS_AS(load_model(dir.path / "bad.bin"), DataError);

    ClusterModel cm;
    cm.cluster_id = 1;
    cm.flows = {0};
    cm.model = GruModel(1, 2, 1);
    save_model(dir.path / "m.bin", cm, "desk");
    const auto size = fs::file_size(dir.path / "m.bin");
    fs::resize_file(dir.path / "m.bin", size - 8);
    CHECK_THROWS_AS(load_model(dir.path / "m.bin"), DataError);
  }

  TEST_CASE("features round trip") {
    TempDir dir("features");
    ReprMatrix r;
    r.kind = Representation::Acf;
    r.axis = {1, 2, 12};
    r.features = {{0.5, 0.25, -0.125}, {1.0, 0.0, 0.1}};
    r.degenerate = {false, false};
    write_features_csv(dir.path / "f.csv", r);
    const auto back = read_features_csv(dir.path / "f.csv", Representation::Acf);
    CHECK(back.axis == r.axis);
    CHECK(back.features == r.features);
  }
}
