#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "gbc/coarsen.hpp"
#include "gbc/graph.hpp"

namespace gbc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// How super-node features are aggregated from member rows.
enum class FeatureAggregation {
  Mean,  ///< X~ = diag(sizes)^-1 P^T X
  Sum,   ///< X~ = P^T X
};

/**
 * The coarsened super-graph. Super-node i stands for partition ball i; its
 * features, dominant label and adjacency live in `super_graph`.
 */
struct CoarsenedGraph {
  Graph super_graph;
  Partition partition;
  /// Super-nodes holding at least one labeled member.
  std::vector<bool> train_mask;
  /// Original edges between distinct balls that collapsed onto an existing super-edge.
  std::size_t merged_cross_edges = 0;

  const FeatureMatrix& features() const { return super_graph.features(); }
  std::span<const Label> labels() const { return super_graph.labels(); }
  std::size_t num_train() const;
};

/// Builds the unweighted, self-loop-free super-graph of a partition.
CoarsenedGraph build_ball_graph(const Graph& g, const Partition& p,
                                FeatureAggregation aggregation = FeatureAggregation::Mean);

/// N x n binary matrix with P(v, ball_of[v]) = 1.
SparseMatrix projection_matrix(const Partition& p);

/// L = D - A of the original graph.
SparseMatrix laplacian(const Graph& g);

/// P^T L P. Not the Laplacian of the unweighted super-graph: the diagonal
/// keeps boundary volume and off-diagonals keep cross-edge multiplicities.
SparseMatrix coarsened_laplacian(const Graph& g, const Partition& p);

/// Sum over balls of the number of ordered labeled pairs (self-pairs
/// included) sharing a label; equals the sum of squared per-ball label counts.
std::uint64_t label_consistency(const Partition& p, std::span<const Label> labels, int num_classes);

struct RayleighDiagnostics {
  double original = 0.0;           ///< x^T L x / x^T x
  double label_consistent = 0.0;   ///< (x^T L x + lambda C(y)) / x^T x
  double coarsened = 0.0;          ///< with x~ = P^T x against P^T L P; NaN if x~ = 0
  std::uint64_t consistency = 0;   ///< C(y)
  std::uint64_t coarse_consistency = 0;  ///< C of ball-dominant labels
};

/**
 * The three Rayleigh quotients for a test vector x. The coarse label
 * consistency term relabels every labeled node with its ball's dominant label,
 * so it coincides with C(y) exactly when all balls are pure.
 * Throws for a zero vector.
 */
RayleighDiagnostics rayleigh_diagnostics(const Graph& g, const Partition& p,
                                         std::span<const double> x, double lambda);

}  // namespace gbc
