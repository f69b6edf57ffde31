#include "gbc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace gbc {

Graph planted_partition(const PlantedPartitionSpec& spec) {
  const std::size_t n = spec.num_nodes;
  const int k = spec.num_classes;
  if (n < 2 || k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("planted_partition: need 2 <= N and 1 <= k <= N");
  }
  if (!(spec.edge_factor >= 0.0) || !(spec.intra_fraction >= 0.0 && spec.intra_fraction <= 1.0) ||
      !(spec.labeled_fraction >= 0.0 && spec.labeled_fraction <= 1.0)) {
    throw std::invalid_argument("planted_partition: fractions must lie in [0, 1]");
  }
  const auto target = static_cast<std::size_t>(std::llround(spec.edge_factor * static_cast<double>(n)));
  const std::size_t max_edges = n * (n - 1) / 2;
  if (target > max_edges / 2) throw std::invalid_argument("planted_partition: edge factor too dense");

  auto block_of = [&](std::size_t v) { return static_cast<Label>(v * static_cast<std::size_t>(k) / n); };
  // Block b spans [first(b), first(b + 1)).
  auto first = [&](std::size_t b) { return (b * n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k); };

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  std::bernoulli_distribution intra(spec.intra_fraction);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(target * 2);
  std::vector<Edge> edges;
  edges.reserve(target);
  while (edges.size() < target) {
    const std::size_t u = any(rng);
    std::size_t v = 0;
    const auto b = static_cast<std::size_t>(block_of(u));
    const std::size_t lo = first(b);
    const std::size_t hi = first(b + 1);
    if (intra(rng) && hi - lo > 1) {
      v = std::uniform_int_distribution<std::size_t>(lo, hi - 1)(rng);
    } else {
      v = any(rng);
    }
    if (u == v) continue;
    const std::uint64_t key = static_cast<std::uint64_t>(std::min(u, v)) * n + std::max(u, v);
    if (!seen.insert(key).second) continue;
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }

  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), k);
  std::vector<Label> labels(n);
  std::bernoulli_distribution keep(spec.labeled_fraction);
  for (std::size_t v = 0; v < n; ++v) {
    x(static_cast<Eigen::Index>(v), block_of(v)) = 1.0;
    labels[v] = keep(rng) ? block_of(v) : kUnlabeled;
  }
  return Graph::build(n, edges, std::move(x), std::move(labels), k);
}

}  // namespace gbc
