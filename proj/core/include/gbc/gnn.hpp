#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "gbc/ballgraph.hpp"
#include "gbc/graph.hpp"

namespace gbc {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;

/// Two-layer GCN weights: logits = A^ relu(A^ X W1) W2, no biases.
struct GcnModel {
  Matrix w1;  ///< d x h
  Matrix w2;  ///< h x k

  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index hidden_dim() const { return w1.cols(); }
  Eigen::Index num_classes() const { return w2.cols(); }
  bool is_finite() const { return w1.allFinite() && w2.allFinite(); }

  /// Glorot-uniform initialisation from a seeded generator.
  static GcnModel glorot(Eigen::Index d, Eigen::Index h, Eigen::Index k, std::uint64_t seed);
};

struct TrainConfig {
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  int max_epochs = 200;
  int hidden = 64;
  int early_stop_patience = 10;
  std::uint64_t seed = 0;
  /// Hidden-layer dropout probability; 0 disables it.
  double dropout = 0.0;
  /// Apply weight decay to W2 as well as W1.
  bool decay_all_layers = false;

  void validate() const;
};

/// Adam moments for both weight matrices.
struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  Matrix m1, v1, m2, v2;
  std::int64_t step = 0;

  explicit AdamState(const GcnModel& model);
  void apply(GcnModel& model, const Matrix& grad_w1, const Matrix& grad_w2, double learning_rate);
};

/// D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I.
SparseRows normalize_adjacency(const Graph& g);

/// Normalized adjacency plus sparse features, ready for forward passes.
struct GcnInput {
  SparseRows adjacency;
  SparseRows features;

  static GcnInput from_graph(const Graph& g, bool row_normalize_features = false);
};

/// Scales every nonzero feature row to unit L1 norm.
FeatureMatrix row_normalized(const FeatureMatrix& x);

Matrix forward(const GcnModel& model, const SparseRows& a_hat, const SparseRows& x);

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

/**
 * Mean softmax cross-entropy over `nodes` plus (weight_decay / 2) * ||W1||_F^2
 * (and ||W2||_F^2 when decay_all_layers). Throws for an empty node list.
 */
double loss(const Matrix& logits, std::span<const Label> labels, std::span<const NodeId> nodes,
            const GcnModel& model, double weight_decay, bool decay_all_layers = false);

struct Gradients {
  double loss = 0.0;
  Matrix w1;
  Matrix w2;
};

/// Loss and analytic gradients. `dropout_mask`, if nonempty, scales hidden units (n x h).
Gradients loss_and_gradients(const GcnModel& model, const GcnInput& input, std::span<const Label> labels,
                             std::span<const NodeId> nodes, double weight_decay, bool decay_all_layers,
                             const Matrix& dropout_mask = Matrix());

/// Node set on the original graph used for early stopping.
struct ValidationTarget {
  const GcnInput* input = nullptr;
  std::span<const Label> labels;
  std::span<const NodeId> nodes;
};

struct TrainResult {
  GcnModel model;  ///< best-validation weights (final weights without validation)
  std::vector<double> loss_history;
  std::vector<double> val_history;
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
};

/// Full-batch Adam on explicit inputs.
TrainResult train(const GcnInput& input, std::span<const Label> labels, std::span<const NodeId> train_nodes,
                  int num_classes, const TrainConfig& cfg, const ValidationTarget* validation = nullptr);

/// Trains on a coarsened graph using its labeled super-nodes.
TrainResult train(const CoarsenedGraph& coarse, const TrainConfig& cfg,
                  const ValidationTarget* validation = nullptr, bool row_normalize_features = false);

std::vector<Label> infer(const GcnInput& input, const GcnModel& model);
std::vector<Label> infer(const Graph& g, const GcnModel& model);

/// Fraction of `nodes` whose prediction equals the label. Throws for an empty list.
double accuracy(std::span<const Label> predictions, std::span<const Label> labels,
                std::span<const NodeId> nodes);

/// Binary checkpoint: "GBW1", d,h,k as little-endian uint32, then W1 and W2
/// row-major as little-endian float64.
void save_checkpoint(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_checkpoint(const std::filesystem::path& path);

}  // namespace gbc
