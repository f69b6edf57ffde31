#pragma once

#include <cstdint>

#include "gbc/graph.hpp"

namespace gbc {

/// Parameters of the planted-partition generator.
struct PlantedPartitionSpec {
  std::size_t num_nodes = 1000;
  /// Target edge count is round(edge_factor * num_nodes), so M grows linearly in N.
  double edge_factor = 4.0;
  int num_classes = 4;
  /// Probability that a sampled edge stays inside its endpoint's block.
  double intra_fraction = 0.8;
  /// Fraction of nodes that keep their label.
  double labeled_fraction = 1.0;
  std::uint64_t seed = 0;
};

/**
 * Erdos-Renyi-style random graph with k planted label blocks. Node v belongs
 * to block v * k / N. Edges are sampled uniformly, intra-block with
 * probability `intra_fraction`; self-loops and repeats are resampled. Features
 * are the one-hot block indicator. Deterministic in the seed.
 */
Graph planted_partition(const PlantedPartitionSpec& spec);

}  // namespace gbc
