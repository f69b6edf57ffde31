#include "gbc/ballgraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "log.hpp"

namespace gbc {

std::size_t CoarsenedGraph::num_train() const {
  return static_cast<std::size_t>(std::count(train_mask.begin(), train_mask.end(), true));
}

CoarsenedGraph build_ball_graph(const Graph& g, const Partition& p, FeatureAggregation aggregation) {
  if (p.ball_of.size() != g.num_nodes()) {
    throw std::invalid_argument("build_ball_graph: partition covers " +
                                std::to_string(p.ball_of.size()) + " nodes, graph has " +
                                std::to_string(g.num_nodes()));
  }
  const std::size_t n = p.num_balls();
  const auto k = static_cast<std::size_t>(g.num_classes());

  FeatureMatrix x = FeatureMatrix::Zero(static_cast<Eigen::Index>(n), g.features().cols());
  std::vector<Label> labels(n, kUnlabeled);
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ball = p.balls[i];
    std::vector<std::uint32_t> counts(k, 0);
    for (NodeId v : ball.nodes) {
      if (p.ball_of[v] != i) throw std::invalid_argument("build_ball_graph: inconsistent partition");
      x.row(static_cast<Eigen::Index>(i)) += g.features().row(v);
      const Label y = g.label(v);
      if (y != kUnlabeled) ++counts[static_cast<std::size_t>(y)];
    }
    if (aggregation == FeatureAggregation::Mean && !ball.nodes.empty()) {
      x.row(static_cast<Eigen::Index>(i)) /= static_cast<double>(ball.nodes.size());
    }
    std::uint32_t best = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > best) {
        best = counts[c];
        labels[i] = static_cast<Label>(c);
      }
    }
    mask[i] = best > 0;
  }

  std::vector<Edge> edges;
  std::size_t crossing = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u >= v) continue;
      const std::uint32_t a = p.ball_of[u];
      const std::uint32_t b = p.ball_of[v];
      if (a == b) continue;
      ++crossing;
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }

  CoarsenedGraph out;
  out.super_graph = Graph::build(n, edges, std::move(x), std::move(labels), g.num_classes());
  out.partition = p;
  out.train_mask = std::move(mask);
  out.merged_cross_edges = crossing - out.super_graph.num_edges();
  detail::logger()->info("ball graph: {} super-nodes, {} super-edges ({} parallel cross edges merged)",
                         n, out.super_graph.num_edges(), out.merged_cross_edges);
  return out;
}

SparseMatrix projection_matrix(const Partition& p) {
  SparseMatrix proj(static_cast<Eigen::Index>(p.num_nodes()), static_cast<Eigen::Index>(p.num_balls()));
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(p.num_nodes());
  for (std::size_t v = 0; v < p.num_nodes(); ++v) {
    entries.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(p.ball_of[v]), 1.0);
  }
  proj.setFromTriplets(entries.begin(), entries.end());
  return proj;
}

SparseMatrix laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  SparseMatrix lap(n, n);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(g.num_nodes() + 2 * g.num_edges());
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    entries.emplace_back(u, u, static_cast<double>(g.degree(u)));
    for (NodeId v : g.neighbors(u)) entries.emplace_back(u, v, -1.0);
  }
  lap.setFromTriplets(entries.begin(), entries.end());
  return lap;
}

SparseMatrix coarsened_laplacian(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) throw std::invalid_argument("coarsened_laplacian: size mismatch");
  const SparseMatrix proj = projection_matrix(p);
  SparseMatrix out = SparseMatrix(proj.transpose()) * laplacian(g) * proj;
  out.prune(0.0);
  return out;
}

std::uint64_t label_consistency(const Partition& p, std::span<const Label> labels, int num_classes) {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)));
  for (const auto& ball : p.balls) {
    std::fill(counts.begin(), counts.end(), 0);
    for (NodeId v : ball.nodes) {
      if (labels[v] != kUnlabeled) ++counts[static_cast<std::size_t>(labels[v])];
    }
    for (std::uint64_t c : counts) total += c * c;
  }
  return total;
}

RayleighDiagnostics rayleigh_diagnostics(const Graph& g, const Partition& p, std::span<const double> x,
                                         double lambda) {
  if (x.size() != g.num_nodes()) throw std::invalid_argument("rayleigh_diagnostics: vector size mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const double norm2 = xv.squaredNorm();
  if (norm2 == 0.0) throw std::invalid_argument("rayleigh_diagnostics: zero vector");

  const SparseMatrix lap = laplacian(g);
  const double quad = xv.dot(lap * xv);

  RayleighDiagnostics out;
  out.consistency = label_consistency(p, g.labels(), g.num_classes());
  // Coarse labels: every labeled node takes its ball's dominant label.
  for (const auto& ball : p.balls) {
    std::uint64_t labeled = 0;
    for (NodeId v : ball.nodes) labeled += g.label(v) != kUnlabeled ? 1 : 0;
    out.coarse_consistency += labeled * labeled;
  }

  out.original = quad / norm2;
  out.label_consistent = (quad + lambda * static_cast<double>(out.consistency)) / norm2;

  const SparseMatrix proj = projection_matrix(p);
  const Eigen::VectorXd coarse = proj.transpose() * xv;
  const double coarse_norm2 = coarse.squaredNorm();
  if (coarse_norm2 == 0.0) {
    out.coarsened = std::numeric_limits<double>::quiet_NaN();
  } else {
    const SparseMatrix lgb = coarsened_laplacian(g, p);
    out.coarsened =
        (coarse.dot(lgb * coarse) + lambda * static_cast<double>(out.coarse_consistency)) / coarse_norm2;
  }
  return out;
}

}  // namespace gbc
