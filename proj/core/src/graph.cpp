#include "gbc/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "log.hpp"

namespace gbc {

Graph Graph::build(std::size_t num_nodes, std::span<const Edge> edges, FeatureMatrix features,
                   std::vector<Label> labels, int num_classes) {
  if (num_nodes >= static_cast<std::size_t>(std::numeric_limits<NodeId>::max())) {
    throw GraphError("node count exceeds 32-bit id space");
  }
  if (static_cast<std::size_t>(features.rows()) != num_nodes) {
    throw GraphError("feature rows (" + std::to_string(features.rows()) + ") != num_nodes (" +
                     std::to_string(num_nodes) + ")");
  }
  if (num_classes < 0) throw GraphError("negative class count");
  if (labels.empty()) {
    labels.assign(num_nodes, kUnlabeled);
  } else if (labels.size() != num_nodes) {
    throw GraphError("label count (" + std::to_string(labels.size()) + ") != num_nodes (" +
                     std::to_string(num_nodes) + ")");
  }
  for (std::size_t v = 0; v < num_nodes; ++v) {
    const Label y = labels[v];
    if (y != kUnlabeled && (y < 0 || y >= num_classes)) {
      throw GraphError("label " + std::to_string(y) + " of node " + std::to_string(v) +
                       " outside [0, " + std::to_string(num_classes) + ")");
    }
  }

  Graph g;
  std::vector<Edge> arcs;
  arcs.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw GraphError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") references node >= " + std::to_string(num_nodes));
    }
    if (e.u == e.v) {
      ++g.stats_.self_loops_dropped;
      continue;
    }
    arcs.push_back({e.u, e.v});
    arcs.push_back({e.v, e.u});
  }
  std::sort(arcs.begin(), arcs.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  const std::size_t before = arcs.size();
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  g.stats_.duplicates_dropped = (before - arcs.size()) / 2;

  g.offsets_.assign(num_nodes + 1, 0);
  for (const Edge& a : arcs) ++g.offsets_[a.u + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.adjacency_.resize(arcs.size());
  std::transform(arcs.begin(), arcs.end(), g.adjacency_.begin(), [](const Edge& a) { return a.v; });

  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.num_classes_ = num_classes;

  if (g.stats_.self_loops_dropped > 0 || g.stats_.duplicates_dropped > 0) {
    detail::logger()->info("graph build: dropped {} self-loops and {} duplicate edges",
                           g.stats_.self_loops_dropped, g.stats_.duplicates_dropped);
  }
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t Graph::num_labeled() const {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(), [](Label y) { return y != kUnlabeled; }));
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.push_back({u, v});
    }
  }
  return out;
}

Graph Graph::with_labels(std::vector<Label> labels) const {
  if (labels.size() != num_nodes()) throw GraphError("label vector size mismatch");
  for (Label y : labels) {
    if (y != kUnlabeled && (y < 0 || y >= num_classes_)) throw GraphError("label out of range");
  }
  Graph g = *this;
  g.labels_ = std::move(labels);
  return g;
}

bool operator==(const Graph& a, const Graph& b) {
  return a.offsets_ == b.offsets_ && a.adjacency_ == b.adjacency_ && a.labels_ == b.labels_ &&
         a.num_classes_ == b.num_classes_ && a.features_.rows() == b.features_.rows() &&
         a.features_.cols() == b.features_.cols() && a.features_ == b.features_;
}

std::size_t degree(const Graph& g, NodeId v) { return g.degree(v); }

InducedSubgraph::InducedSubgraph(const Graph& g, std::span<const NodeId> nodes)
    : nodes_(nodes.begin(), nodes.end()) {
  if (!std::is_sorted(nodes_.begin(), nodes_.end())) std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  offsets_.assign(nodes_.size() + 1, 0);
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    for (NodeId w : g.neighbors(nodes_[i])) {
      const std::uint32_t j = local(w);
      if (j != kNoCenter) adjacency_.push_back(j);
    }
    offsets_[i + 1] = adjacency_.size();
  }
}

std::uint32_t InducedSubgraph::local(NodeId global) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), global);
  if (it == nodes_.end() || *it != global) return kNoCenter;
  return static_cast<std::uint32_t>(it - nodes_.begin());
}

NearestCenter multi_source_bfs(const InducedSubgraph& sub, std::span<const std::uint32_t> centers) {
  if (centers.empty()) throw GraphError("multi_source_bfs: empty center list");
  const std::size_t n = sub.size();
  NearestCenter out{std::vector<std::uint32_t>(n, kNoCenter),
                    std::vector<std::uint32_t>(n, kUnreachable)};
  std::vector<std::uint32_t> queue;
  queue.reserve(n);
  for (std::uint32_t i = 0; i < centers.size(); ++i) {
    const std::uint32_t c = centers[i];
    if (c >= n) throw GraphError("multi_source_bfs: center outside the search space");
    if (out.center[c] != kNoCenter) continue;
    out.center[c] = i;
    out.distance[c] = 0;
    queue.push_back(c);
  }
  // FIFO order keeps every BFS level sorted by center index, so the first
  // discovery of a node comes from the earliest equidistant center.
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t u = queue[head];
    for (std::uint32_t w : sub.neighbors(u)) {
      if (out.center[w] != kNoCenter) continue;
      out.center[w] = out.center[u];
      out.distance[w] = out.distance[u] + 1;
      queue.push_back(w);
    }
  }
  return out;
}

NearestCenter multi_source_bfs(const Graph& g, std::span<const NodeId> restrict,
                               std::span<const NodeId> centers) {
  if (centers.empty()) throw GraphError("multi_source_bfs: empty center list");
  InducedSubgraph sub(g, restrict);
  std::vector<std::uint32_t> local_centers;
  local_centers.reserve(centers.size());
  for (NodeId c : centers) {
    const std::uint32_t l = sub.local(c);
    if (l == kNoCenter) throw GraphError("multi_source_bfs: center not in restrict set");
    local_centers.push_back(l);
  }
  NearestCenter local = multi_source_bfs(sub, local_centers);
  NearestCenter out{std::vector<std::uint32_t>(g.num_nodes(), kNoCenter),
                    std::vector<std::uint32_t>(g.num_nodes(), kUnreachable)};
  for (std::uint32_t i = 0; i < sub.size(); ++i) {
    out.center[sub.global(i)] = local.center[i];
    out.distance[sub.global(i)] = local.distance[i];
  }
  return out;
}

std::vector<std::vector<NodeId>> connected_components(const InducedSubgraph& sub) {
  const std::size_t n = sub.size();
  std::vector<bool> seen(n, false);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<NodeId>> comps;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t u = stack.back();
      stack.pop_back();
      comp.push_back(sub.global(u));
      for (std::uint32_t w : sub.neighbors(u)) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  // Local ids follow global order and seeds are scanned ascending, so the
  // list is already ordered by smallest member.
  return comps;
}

std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack;
  std::vector<std::vector<NodeId>> comps;
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp;
    seen[s] = true;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (NodeId w : g.neighbors(u)) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace gbc
