#include "gbc/gnn.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "log.hpp"

namespace gbc {

namespace {

void fill_uniform(Matrix& m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  }
}

void check_nodes(std::span<const Label> labels, std::span<const NodeId> nodes, Eigen::Index rows,
                 Eigen::Index classes) {
  if (nodes.empty()) throw std::invalid_argument("empty node mask");
  for (NodeId v : nodes) {
    if (static_cast<Eigen::Index>(v) >= rows || v >= labels.size()) {
      throw std::invalid_argument("mask node out of range");
    }
    if (labels[v] < 0 || labels[v] >= classes) {
      throw std::invalid_argument("mask node " + std::to_string(v) + " has no usable label");
    }
  }
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double top = row.maxCoeff();
  return top + std::log((row.array() - top).exp().sum());
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                  static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_le(std::istream& in, int width) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), width);
  if (!in) throw std::runtime_error("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = width - 1; i >= 0; --i) v = (v << 8) | bytes[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

GcnModel GcnModel::glorot(Eigen::Index d, Eigen::Index h, Eigen::Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GcnModel m{Matrix(d, h), Matrix(h, k)};
  fill_uniform(m.w1, std::sqrt(6.0 / static_cast<double>(d + h)), rng);
  fill_uniform(m.w2, std::sqrt(6.0 / static_cast<double>(h + k)), rng);
  return m;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !(weight_decay >= 0.0)) {
    throw std::invalid_argument("learning rate and weight decay must be non-negative");
  }
  if (max_epochs < 1 || hidden < 1 || early_stop_patience < 1) {
    throw std::invalid_argument("epochs, hidden width and patience must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must lie in [0, 1)");
}

AdamState::AdamState(const GcnModel& model)
    : m1(Matrix::Zero(model.w1.rows(), model.w1.cols())),
      v1(Matrix::Zero(model.w1.rows(), model.w1.cols())),
      m2(Matrix::Zero(model.w2.rows(), model.w2.cols())),
      v2(Matrix::Zero(model.w2.rows(), model.w2.cols())) {}

void AdamState::apply(GcnModel& model, const Matrix& grad_w1, const Matrix& grad_w2, double learning_rate) {
  ++step;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
  auto update = [&](Matrix& w, Matrix& m, Matrix& v, const Matrix& g) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    w.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + kEpsilon);
  };
  update(model.w1, m1, v1, grad_w1);
  update(model.w2, m2, v2, grad_w2);
}

SparseRows normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(n + 2 * g.num_edges());
  for (NodeId u = 0; u < n; ++u) {
    entries.emplace_back(u, u, inv_sqrt[u] * inv_sqrt[u]);
    for (NodeId v : g.neighbors(u)) entries.emplace_back(u, v, inv_sqrt[u] * inv_sqrt[v]);
  }
  SparseRows a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

FeatureMatrix row_normalized(const FeatureMatrix& x) {
  FeatureMatrix out = x;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double s = out.row(r).cwiseAbs().sum();
    if (s > 0.0) out.row(r) /= s;
  }
  return out;
}

GcnInput GcnInput::from_graph(const Graph& g, bool row_normalize_features) {
  GcnInput in;
  in.adjacency = normalize_adjacency(g);
  in.features = row_normalize_features ? SparseRows(row_normalized(g.features()).sparseView())
                                       : SparseRows(g.features().sparseView());
  return in;
}

Matrix forward(const GcnModel& model, const SparseRows& a_hat, const SparseRows& x) {
  if (x.cols() != model.w1.rows() || model.w1.cols() != model.w2.rows()) {
    throw std::invalid_argument("forward: weight shapes do not match features");
  }
  if (a_hat.rows() != x.rows() || a_hat.cols() != x.rows()) {
    throw std::invalid_argument("forward: adjacency and feature row counts differ");
  }
  const Matrix xw = x * model.w1;
  const Matrix hidden = (a_hat * xw).cwiseMax(0.0);
  const Matrix hw = hidden * model.w2;
  return a_hat * hw;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double top = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - top).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

double loss(const Matrix& logits, std::span<const Label> labels, std::span<const NodeId> nodes,
            const GcnModel& model, double weight_decay, bool decay_all_layers) {
  check_nodes(labels, nodes, logits.rows(), logits.cols());
  double ce = 0.0;
  for (NodeId v : nodes) {
    const auto r = static_cast<Eigen::Index>(v);
    ce += log_sum_exp(logits.row(r)) - logits(r, labels[v]);
  }
  ce /= static_cast<double>(nodes.size());
  double decay = model.w1.squaredNorm();
  if (decay_all_layers) decay += model.w2.squaredNorm();
  return ce + 0.5 * weight_decay * decay;
}

Gradients loss_and_gradients(const GcnModel& model, const GcnInput& input, std::span<const Label> labels,
                             std::span<const NodeId> nodes, double weight_decay, bool decay_all_layers,
                             const Matrix& dropout_mask) {
  const SparseRows& a_hat = input.adjacency;
  const SparseRows& x = input.features;
  check_nodes(labels, nodes, a_hat.rows(), model.num_classes());

  const Matrix pre = a_hat * (x * model.w1);
  Matrix hidden = pre.cwiseMax(0.0);
  if (dropout_mask.size() > 0) hidden = hidden.cwiseProduct(dropout_mask);
  const Matrix logits = a_hat * (hidden * model.w2);

  Gradients g;
  Matrix dlogits = Matrix::Zero(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(nodes.size());
  double ce = 0.0;
  for (NodeId v : nodes) {
    const auto r = static_cast<Eigen::Index>(v);
    const double lse = log_sum_exp(logits.row(r));
    ce += lse - logits(r, labels[v]);
    dlogits.row(r).array() += (logits.row(r).array() - lse).exp() * inv;
    dlogits(r, labels[v]) -= inv;
  }
  double decay = model.w1.squaredNorm();
  if (decay_all_layers) decay += model.w2.squaredNorm();
  g.loss = ce * inv + 0.5 * weight_decay * decay;

  // A^ is symmetric, so A^T G = A^ G.
  const Matrix back2 = a_hat * dlogits;
  g.w2 = hidden.transpose() * back2;
  Matrix dhidden = back2 * model.w2.transpose();
  if (dropout_mask.size() > 0) dhidden = dhidden.cwiseProduct(dropout_mask);
  const Matrix dpre = dhidden.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  const Matrix back1 = a_hat * dpre;
  g.w1 = x.transpose() * back1;
  g.w1 += weight_decay * model.w1;
  if (decay_all_layers) g.w2 += weight_decay * model.w2;
  return g;
}

TrainResult train(const GcnInput& input, std::span<const Label> labels, std::span<const NodeId> train_nodes,
                  int num_classes, const TrainConfig& cfg, const ValidationTarget* validation) {
  cfg.validate();
  if (train_nodes.empty()) throw std::invalid_argument("train: no labeled training nodes");
  if (num_classes < 1) throw std::invalid_argument("train: need at least one class");

  TrainResult result;
  GcnModel model = GcnModel::glorot(input.features.cols(), cfg.hidden, num_classes, cfg.seed);
  AdamState adam(model);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::bernoulli_distribution keep(1.0 - cfg.dropout);

  GcnModel best = model;
  double best_val = -1.0;
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Matrix mask;
    if (cfg.dropout > 0.0) {
      mask.resize(input.adjacency.rows(), cfg.hidden);
      const double scale = 1.0 / (1.0 - cfg.dropout);
      for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = keep(dropout_rng) ? scale : 0.0;
    }
    const Gradients grads = loss_and_gradients(model, input, labels, train_nodes, cfg.weight_decay,
                                               cfg.decay_all_layers, mask);
    result.loss_history.push_back(grads.loss);
    adam.apply(model, grads.w1, grads.w2, cfg.learning_rate);
    result.epochs_run = epoch;

    if (validation == nullptr) continue;
    const double acc = accuracy(infer(*validation->input, model), validation->labels, validation->nodes);
    result.val_history.push_back(acc);
    if (acc > best_val) {
      best_val = acc;
      best = model;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.early_stop_patience) {
      break;
    }
  }

  if (!model.is_finite()) detail::logger()->warn("train: non-finite weights after {} epochs", result.epochs_run);
  if (validation != nullptr) {
    result.model = std::move(best);
    result.best_val_accuracy = best_val;
  } else {
    result.model = std::move(model);
    result.best_epoch = result.epochs_run;
  }
  detail::logger()->debug("train: {} epochs, best epoch {}, best val {:.4f}", result.epochs_run,
                          result.best_epoch, result.best_val_accuracy);
  return result;
}

TrainResult train(const CoarsenedGraph& coarse, const TrainConfig& cfg, const ValidationTarget* validation,
                  bool row_normalize_features) {
  std::vector<NodeId> nodes;
  for (NodeId i = 0; i < coarse.train_mask.size(); ++i) {
    if (coarse.train_mask[i]) nodes.push_back(i);
  }
  if (nodes.empty()) throw std::invalid_argument("train: coarsened graph has no labeled super-nodes");
  const GcnInput input = GcnInput::from_graph(coarse.super_graph, row_normalize_features);
  return train(input, coarse.labels(), nodes, coarse.super_graph.num_classes(), cfg, validation);
}

std::vector<Label> infer(const GcnInput& input, const GcnModel& model) {
  const Matrix logits = forward(model, input.adjacency, input.features);
  std::vector<Label> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    Eigen::Index arg = 0;
    logits.row(r).maxCoeff(&arg);
    out[static_cast<std::size_t>(r)] = static_cast<Label>(arg);
  }
  return out;
}

std::vector<Label> infer(const Graph& g, const GcnModel& model) {
  return infer(GcnInput::from_graph(g), model);
}

double accuracy(std::span<const Label> predictions, std::span<const Label> labels,
                std::span<const NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("accuracy: empty mask");
  std::size_t correct = 0;
  for (NodeId v : nodes) {
    if (v >= predictions.size() || v >= labels.size()) throw std::invalid_argument("accuracy: node out of range");
    correct += predictions[v] == labels[v] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

void save_checkpoint(const GcnModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write("GBW1", 4);
  put_u32(out, static_cast<std::uint32_t>(model.w1.rows()));
  put_u32(out, static_cast<std::uint32_t>(model.w1.cols()));
  put_u32(out, static_cast<std::uint32_t>(model.w2.cols()));
  for (const Matrix* w : {&model.w1, &model.w2}) {
    for (Eigen::Index r = 0; r < w->rows(); ++r) {
      for (Eigen::Index c = 0; c < w->cols(); ++c) put_f64(out, (*w)(r, c));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

GcnModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::string_view(magic.data(), 4) != "GBW1") throw std::runtime_error("bad checkpoint magic");
  const auto d = static_cast<Eigen::Index>(get_le(in, 4));
  const auto h = static_cast<Eigen::Index>(get_le(in, 4));
  const auto k = static_cast<Eigen::Index>(get_le(in, 4));
  GcnModel m{Matrix(d, h), Matrix(h, k)};
  for (Matrix* w : {&m.w1, &m.w2}) {
    for (Eigen::Index r = 0; r < w->rows(); ++r) {
      for (Eigen::Index c = 0; c < w->cols(); ++c) (*w)(r, c) = std::bit_cast<double>(get_le(in, 8));
    }
  }
  return m;
}

}  // namespace gbc
