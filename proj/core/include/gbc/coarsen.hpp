#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "gbc/graph.hpp"

namespace gbc {

/**
 * A granular-ball: a connected node subset of the original graph together
 * with its max-degree center and label statistics. Unlabeled members count
 * toward the size but not toward purity.
 */
struct GranularBall {
  std::vector<NodeId> nodes;  ///< sorted ascending, nonempty
  NodeId center = 0;
  double purity = 1.0;
  Label dominant_label = kUnlabeled;
  std::vector<std::uint32_t> label_counts;  ///< one entry per class

  std::size_t size() const { return nodes.size(); }
  std::uint32_t num_labeled() const;
};

/// Total assignment of nodes to balls; the sparse form of the projection matrix.
struct Partition {
  std::vector<std::uint32_t> ball_of;
  std::vector<GranularBall> balls;

  std::size_t num_nodes() const { return ball_of.size(); }
  std::size_t num_balls() const { return balls.size(); }
  /// n / N
  double ratio() const;
};

/// How split_ball picks its two new centers.
enum class SplitCenterRule {
  /// The two highest in-ball-degree nodes.
  TopDegree,
  /// Experimental: highest-degree node, then the highest-degree node carrying
  /// a different label (falls back to TopDegree when none exists).
  LabelDiversity,
};

struct CoarsenParams {
  /// Balls with purity below this are split. In (0, 1].
  double purity_threshold = 1.0;
  /// Empty selects adaptive mode; otherwise the target ratio r in (0, 1).
  std::optional<double> target_ratio;
  SplitCenterRule split_rule = SplitCenterRule::TopDegree;

  void validate() const;
};

/// Label histogram, purity and dominant label of a node set.
void refresh_statistics(const Graph& g, GranularBall& ball);

/// max_i n_i / n over labeled members; 1 when the ball has no labeled members.
double purity(const GranularBall& ball, std::span<const Label> labels, int num_classes);

/**
 * Initial centers for one connected component: round(sqrt(|component|))
 * centers (at least 1) spread evenly over classes, each class contributing
 * its highest-degree labeled nodes; shortfalls are refilled from the
 * highest-degree unused nodes. Ties break toward the lower node id.
 */
std::vector<NodeId> select_initial_centers(const Graph& g, std::span<const NodeId> component);

/// Nearest-center assignment of a connected component; one ball per center.
Partition coarse_partition(const Graph& g, std::span<const NodeId> component,
                           std::span<const NodeId> centers);

/**
 * Binary split: the two top in-ball-degree nodes become centers, every member
 * joins the nearer one (ties to the first), and each side is further split
 * into its connected components. Throws for balls with fewer than 2 nodes.
 */
std::vector<GranularBall> split_ball(const Graph& g, const GranularBall& ball,
                                     SplitCenterRule rule = SplitCenterRule::TopDegree);

/// Adaptive purity-driven splitting of one connected component.
Partition sggbs(const Graph& g, std::span<const NodeId> component, const CoarsenParams& params);

/// Adaptive coarsening of the whole graph, component by component.
Partition sgbgc(const Graph& g, const CoarsenParams& params);

/// Fixed-ratio coarsening: splits in priority order until ceil(r*N) balls exist.
Partition coarsen_to_ratio(const Graph& g, const CoarsenParams& params);

/// Dispatches on params.target_ratio.
Partition coarsen(const Graph& g, const CoarsenParams& params);

/// Rebuilds a partition (ball statistics included) from a node-to-ball map.
Partition partition_from_assignment(const Graph& g, std::vector<std::uint32_t> ball_of);

/// Checks totality, disjointness and that every ball induces a connected subgraph.
bool is_valid_partition(const Graph& g, const Partition& p);

/// Text format: header "#balls=<n> ratio=<n/N>", then "<node_id> <ball_index>" per node.
void write_partition(const Partition& p, const std::filesystem::path& path);
std::vector<std::uint32_t> read_partition_assignment(const std::filesystem::path& path);

}  // namespace gbc
