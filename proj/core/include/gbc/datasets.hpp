#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "gbc/graph.hpp"

namespace gbc {

/// Disjoint train/validation/test node lists, each sorted ascending.
struct SplitMasks {
  std::vector<NodeId> train;
  std::vector<NodeId> val;
  std::vector<NodeId> test;
};

/// Contents of manifest.json; paths are resolved against the manifest's directory.
struct DatasetManifest {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::size_t num_nodes = 0;
  std::size_t num_features = 0;
  int num_classes = 0;
  std::optional<std::filesystem::path> split;

  static DatasetManifest read(const std::filesystem::path& manifest_path);
};

struct Dataset {
  Graph graph;
  std::optional<SplitMasks> split;  ///< present when the manifest names a split file
  std::size_t edge_lines = 0;       ///< `u v` lines read, before self-loop and duplicate removal
};

/**
 * Loads and validates a dataset. Throws GraphError naming the file and line
 * for malformed input, dimension mismatches and out-of-range labels.
 */
Dataset load_dataset(const std::filesystem::path& manifest_path);

/**
 * Writes edges.txt (each edge once, u < v), features.csv, labels.txt and
 * manifest.json into `dir`, creating it if needed. Reals are written in
 * shortest round-trip form, so export -> load -> export is byte-identical.
 */
void export_dataset(const Graph& g, const std::filesystem::path& dir);

/**
 * Seeded shuffle of the labeled nodes split 60/20/20 with largest-remainder
 * rounding. Throws std::invalid_argument with fewer than 5 labeled nodes.
 */
SplitMasks make_split(const Graph& g, std::uint64_t seed);

/// split.json: {"train": [...], "val": [...], "test": [...]}.
SplitMasks read_split(const std::filesystem::path& path, std::size_t num_nodes);
void write_split(const SplitMasks& split, const std::filesystem::path& path);

/**
 * Each labeled node independently, with probability `rate`, takes a label
 * drawn uniformly from the other k-1 classes. Unlabeled nodes are untouched.
 * When `only` is nonempty, nodes outside it are also left untouched.
 * Throws for rate outside [0, 1] or for k < 2 with rate > 0.
 */
std::vector<Label> inject_label_noise(std::span<const Label> labels, int num_classes, double rate,
                                      std::uint64_t seed, std::span<const NodeId> only = {});

/// Copy of `labels` with every node outside `keep` set to kUnlabeled.
std::vector<Label> restrict_labels(std::span<const Label> labels, std::span<const NodeId> keep);

}  // namespace gbc
