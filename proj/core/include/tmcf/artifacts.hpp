#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmcf/cluster.hpp"
#include "tmcf/eval.hpp"
#include "tmcf/predict.hpp"
#include "tmcf/repr.hpp"

namespace tmcf {

/// 64-bit FNV-1a. Used to content-address stage outputs, not for security.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
std::string hash_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never see a
/// partial artifact.
void write_text(const std::filesystem::path& path, std::string_view text);

/// {"labels": [...], "k": K, "method": "...", "seed": S?}
std::string partition_to_json(const Partition& p);
Partition partition_from_json(const std::string& text, const std::string& source = "partition");
void write_partition(const std::filesystem::path& path, const Partition& p);
Partition read_partition(const std::filesystem::path& path);

/// Columns step,a,b,height,size.
void write_dendrogram_csv(const std::filesystem::path& path, const Dendrogram& d);
Dendrogram read_dendrogram_csv(const std::filesystem::path& path, Linkage linkage);

/// First line `# metric=<name>`, then M rows of M comma-separated values.
void write_dissimilarity_csv(const std::filesystem::path& path, const DissimilarityMatrix& d);
/// `fallback` is used when the file carries no metric line.
DissimilarityMatrix read_dissimilarity_csv(const std::filesystem::path& path,
                                           std::optional<Metric> fallback = std::nullopt);

/// Header `flow,<axis values>`, one row per flow.
void write_features_csv(const std::filesystem::path& path, const ReprMatrix& r);
ReprMatrix read_features_csv(const std::filesystem::path& path, Representation kind);

/// Columns k,mean_rmse,rmse_std,mean_runtime_s.
void write_sweep_csv(const std::filesystem::path& path, const SweepCurve& c);
SweepCurve read_sweep_csv(const std::filesystem::path& path);

/// Columns flow,src,dst,rmse_normalized,rmse_mbps.
void write_per_flow_csv(const std::filesystem::path& path, std::size_t n_nodes, const std::vector<double>& normalized,
                        const std::vector<double>& mbps);
/// The `column` of a per-flow CSV ("rmse_normalized" or "rmse_mbps").
std::vector<double> read_per_flow_csv(const std::filesystem::path& path, std::string_view column);

/// Per-cluster training summaries. Wall times are included only on request
/// because they differ between otherwise identical runs.
std::string train_report_json(const std::vector<ClusterModel>& models, bool include_wall_time);

}  // namespace tmcf
