#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gbc {

using NodeId = std::uint32_t;
using Label = std::int32_t;

inline constexpr Label kUnlabeled = -1;
inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::uint32_t kNoCenter = std::numeric_limits<std::uint32_t>::max();

/// Dense node-feature matrix, one row per node.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Edge {
  NodeId u;
  NodeId v;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Counts of input edges discarded while building a simple graph.
struct BuildStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/**
 * Immutable simple undirected graph stored as CSR adjacency with sorted
 * neighbor lists, plus per-node features and optional integer labels.
 *
 * Safe for concurrent reads once built.
 */
class Graph {
 public:
  Graph() = default;

  /**
   * Builds a graph from an edge list. Both (u,v) and (v,u) describe the same
   * undirected edge; duplicates and self-loops are dropped and counted in
   * build_stats().
   *
   * `labels` may be empty, meaning every node is unlabeled. Otherwise it must
   * have `num_nodes` entries, each kUnlabeled or in [0, num_classes).
   * `features` must have `num_nodes` rows (any number of columns, including 0).
   */
  static Graph build(std::size_t num_nodes, std::span<const Edge> edges, FeatureMatrix features,
                     std::vector<Label> labels, int num_classes);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }
  std::size_t num_features() const { return static_cast<std::size_t>(features_.cols()); }
  int num_classes() const { return num_classes_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(NodeId u, NodeId v) const;

  const FeatureMatrix& features() const { return features_; }
  std::span<const Label> labels() const { return labels_; }
  Label label(NodeId v) const { return labels_[v]; }
  std::size_t num_labeled() const;

  /// Each undirected edge once, as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edge_list() const;

  /// Same topology and features with a replacement label vector.
  Graph with_labels(std::vector<Label> labels) const;

  const BuildStats& build_stats() const { return stats_; }

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  FeatureMatrix features_;
  std::vector<Label> labels_;
  int num_classes_ = 0;
  BuildStats stats_;
};

/// Sum of degrees equals twice the edge count.
std::size_t degree(const Graph& g, NodeId v);

/**
 * Subgraph induced by a node subset, re-indexed to local ids 0..n-1 in the
 * order of `nodes`. Building costs O(sum of global degrees of `nodes`).
 */
class InducedSubgraph {
 public:
  InducedSubgraph(const Graph& g, std::span<const NodeId> nodes);

  std::size_t size() const { return nodes_.size(); }
  NodeId global(std::uint32_t local) const { return nodes_[local]; }
  std::span<const NodeId> nodes() const { return nodes_; }
  std::span<const std::uint32_t> neighbors(std::uint32_t local) const {
    return {adjacency_.data() + offsets_[local], adjacency_.data() + offsets_[local + 1]};
  }
  std::size_t degree(std::uint32_t local) const { return offsets_[local + 1] - offsets_[local]; }

  /// Local id of a global node, or kNoCenter if the node is not in the subset.
  std::uint32_t local(NodeId global) const;

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
};

/// Per-node outcome of a multi-source BFS.
struct NearestCenter {
  /// Index into the center list, or kNoCenter when unreachable.
  std::vector<std::uint32_t> center;
  /// Hop distance to that center, or kUnreachable.
  std::vector<std::uint32_t> distance;
};

/**
 * Multi-source BFS over an induced subgraph. Every reachable node is assigned
 * the center at minimum hop distance; ties go to the center appearing first
 * in `centers`. Repeated centers keep their first position. Results are
 * indexed by local id.
 */
NearestCenter multi_source_bfs(const InducedSubgraph& sub, std::span<const std::uint32_t> centers);

/**
 * Same as above on the original graph: the search is confined to the
 * subgraph induced by `restrict`, results are indexed by global node id and
 * nodes outside `restrict` are reported unreachable.
 */
NearestCenter multi_source_bfs(const Graph& g, std::span<const NodeId> restrict,
                               std::span<const NodeId> centers);

/// Connected components of an induced subgraph, as sorted global node ids,
/// ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const InducedSubgraph& sub);

std::vector<std::vector<NodeId>> connected_components(const Graph& g);

}  // namespace gbc
