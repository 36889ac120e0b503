#include "tmcf/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

#include "tmcf/errors.hpp"
#include "tmcf/repr.hpp"

namespace tmcf {

Linkage parse_linkage(std::string_view name) {
  if (name == "complete") return Linkage::Complete;
  if (name == "average") return Linkage::Average;
  throw ConfigError("unknown linkage '" + std::string(name) + "' (expected complete or average)");
}

std::string_view to_string(Linkage linkage) { return linkage == Linkage::Complete ? "complete" : "average"; }

std::vector<std::vector<std::size_t>> Partition::members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(std::max(k, 0)));
  for (std::size_t m = 0; m < labels.size(); ++m) out[static_cast<std::size_t>(labels[m] - 1)].push_back(m);
  return out;
}

void Partition::validate() const {
  if (k < 1) throw DataError("partition must have at least one cluster");
  if (labels.size() < static_cast<std::size_t>(k)) throw DataError("partition has more clusters than flows");
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (const int label : labels) {
    if (label < 1 || label > k) {
      throw DataError("partition label " + std::to_string(label) + " outside 1.." + std::to_string(k));
    }
    ++counts[static_cast<std::size_t>(label - 1)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw DataError("partition cluster " + std::to_string(c + 1) + " is empty");
  }
}

Partition Partition::from_labels(const std::vector<int>& raw, std::string method) {
  std::map<int, int> relabel;
  Partition p;
  p.method = std::move(method);
  p.labels.reserve(raw.size());
  for (const int label : raw) {
    const auto [it, inserted] = relabel.try_emplace(label, static_cast<int>(relabel.size()) + 1);
    p.labels.push_back(it->second);
  }
  p.k = static_cast<int>(relabel.size());
  return p;
}

Dendrogram hac(const DissimilarityMatrix& d, Linkage linkage) {
  const std::size_t n = d.size();
  if (n < 2) throw DataError("hac needs at least two items");
  d.validate(1e-12);

  struct Slot {
    std::size_t id;
    std::size_t size;
    std::size_t min_member;
    bool active;
  };
  std::vector<Slot> slots(n);
  for (std::size_t i = 0; i < n; ++i) slots[i] = {i, 1, i, true};
  std::vector<double> dist(d.values());

  Dendrogram out;
  out.leaves = n;
  out.linkage = linkage;
  out.merges.reserve(n - 1);

  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best_key{n, n};
    std::size_t bi = n, bj = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!slots[i].active) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!slots[j].active) continue;
        const double v = dist[i * n + j];
        const std::pair<std::size_t, std::size_t> key = std::minmax(slots[i].min_member, slots[j].min_member);
        if (v < best || (v == best && key < best_key)) {
          best = v;
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    }

    // Keep the merged cluster in the slot whose representative is smaller.
    if (slots[bj].min_member < slots[bi].min_member) std::swap(bi, bj);
    Slot& keep = slots[bi];
    Slot& gone = slots[bj];
    out.merges.push_back({keep.id, gone.id, best, keep.size + gone.size});

    const auto size_keep = static_cast<double>(keep.size);
    const auto size_gone = static_cast<double>(gone.size);
    for (std::size_t w = 0; w < n; ++w) {
      if (!slots[w].active || w == bi || w == bj) continue;
      const double a = dist[bi * n + w];
      const double b = dist[bj * n + w];
      const double merged =
          linkage == Linkage::Complete ? std::max(a, b) : (size_keep * a + size_gone * b) / (size_keep + size_gone);
      dist[bi * n + w] = merged;
      dist[w * n + bi] = merged;
    }
    keep.id = n + step;
    keep.size += gone.size;
    gone.active = false;
  }
  return out;
}

Partition cut(const Dendrogram& dendrogram, std::size_t k) {
  const std::size_t n = dendrogram.leaves;
  if (k < 1 || k > n) throw ConfigError("cut: k = " + std::to_string(k) + " outside 1.." + std::to_string(n));

  // Cluster id -> members, applying the first n - k merges.
  std::vector<std::vector<std::size_t>> members(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  for (std::size_t s = 0; s < n - k; ++s) {
    const Merge& mg = dendrogram.merges[s];
    auto& target = members[n + s];
    target = std::move(members[mg.a]);
    target.insert(target.end(), members[mg.b].begin(), members[mg.b].end());
    members[mg.b].clear();
  }

  std::vector<int> raw(n, -1);
  int next = 0;
  for (auto& group : members) {
    if (group.empty()) continue;
    for (const std::size_t leaf : group) raw[leaf] = next;
    ++next;
  }
  Partition p = Partition::from_labels(raw, std::string("hac-") + std::string(to_string(dendrogram.linkage)));
  return p;
}

Partition naive_partition(std::size_t m, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k > m) throw ConfigError("naive: k = " + std::to_string(k) + " outside 1.." + std::to_string(m));
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Partition p;
  p.labels.assign(m, 0);
  for (std::size_t pos = 0; pos < m; ++pos) p.labels[order[pos]] = static_cast<int>(pos % k) + 1;
  p.k = static_cast<int>(k);
  p.method = "naive";
  p.seed = seed;
  return p;
}

}  // namespace tmcf
