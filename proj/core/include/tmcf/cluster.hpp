#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmcf {

class DissimilarityMatrix;

enum class Linkage { Complete, Average };

Linkage parse_linkage(std::string_view name);
std::string_view to_string(Linkage linkage);

/// Assignment of M flows to K clusters. Labels are 1-based and every label in
/// 1..K is used at least once.
struct Partition {
  std::vector<int> labels;
  int k = 0;
  std::string method;
  std::optional<std::uint64_t> seed;

  std::size_t size() const noexcept { return labels.size(); }

  /// Flow indices per cluster; entry c holds the members of label c + 1 in
  /// increasing order.
  std::vector<std::vector<std::size_t>> members() const;

  /// Throws DataError unless labels are in range and every cluster is nonempty.
  void validate() const;

  /// Builds a partition from arbitrary integer labels, relabelled 1..K in order
  /// of each cluster's smallest member.
  static Partition from_labels(const std::vector<int>& raw, std::string method);
};

struct Merge {
  std::size_t a = 0;  // cluster ids: leaves 0..M-1, merge s creates M + s
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaves = 0;
  Linkage linkage = Linkage::Complete;
  std::vector<Merge> merges;  // M - 1 entries
};

/// Agglomerative clustering from singletons. Complete linkage uses the
/// maximum cross-pair distance, average linkage the mean over all |U||V|
/// cross pairs. Equal candidate distances are resolved by the smallest
/// (min member, max member) pair of cluster representatives.
Dendrogram hac(const DissimilarityMatrix& d, Linkage linkage);

/// Undo the last k - 1 merges; clusters are labelled by smallest member.
Partition cut(const Dendrogram& dendrogram, std::size_t k);

/// Random balanced assignment: seeded shuffle dealt round-robin.
Partition naive_partition(std::size_t m, std::size_t k, std::uint64_t seed);

}  // namespace tmcf
