#include "gbc/coarsen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

#include "log.hpp"

namespace gbc {

namespace {

// Highest in-subgraph degree, lowest id on ties. Local ids follow global order.
std::uint32_t max_degree_local(const InducedSubgraph& sub, std::uint32_t skip = kNoCenter) {
  std::uint32_t best = kNoCenter;
  for (std::uint32_t i = 0; i < sub.size(); ++i) {
    if (i == skip) continue;
    if (best == kNoCenter || sub.degree(i) > sub.degree(best)) best = i;
  }
  return best;
}

void refresh_labels(const Graph& g, GranularBall& ball) {
  const int k = g.num_classes();
  ball.label_counts.assign(static_cast<std::size_t>(k), 0);
  for (NodeId v : ball.nodes) {
    const Label y = g.label(v);
    if (y != kUnlabeled) ++ball.label_counts[static_cast<std::size_t>(y)];
  }
  ball.purity = purity(ball, g.labels(), k);
  ball.dominant_label = kUnlabeled;
  std::uint32_t best = 0;
  for (int c = 0; c < k; ++c) {
    if (ball.label_counts[static_cast<std::size_t>(c)] > best) {
      best = ball.label_counts[static_cast<std::size_t>(c)];
      ball.dominant_label = c;
    }
  }
}

GranularBall make_ball(const Graph& g, const InducedSubgraph& sub) {
  GranularBall ball;
  ball.nodes.assign(sub.nodes().begin(), sub.nodes().end());
  ball.center = sub.global(max_degree_local(sub));
  refresh_labels(g, ball);
  return ball;
}

GranularBall make_ball(const Graph& g, std::vector<NodeId> nodes) {
  InducedSubgraph sub(g, nodes);
  return make_ball(g, sub);
}

bool needs_purity_split(const GranularBall& b, double threshold) {
  return b.size() >= 2 && b.purity < threshold;
}

// Split priority: lower purity first, then larger balls, then lower first node id.
struct ImpurityOrder {
  const std::vector<GranularBall>* pool;
  bool operator()(std::size_t a, std::size_t b) const {
    const GranularBall& x = (*pool)[a];
    const GranularBall& y = (*pool)[b];
    if (x.purity != y.purity) return x.purity > y.purity;
    if (x.size() != y.size()) return x.size() < y.size();
    return x.nodes.front() > y.nodes.front();
  }
};

// For splitting pure balls in fixed-ratio mode: larger first, then lower id.
struct SizeOrder {
  const std::vector<GranularBall>* pool;
  bool operator()(std::size_t a, std::size_t b) const {
    const GranularBall& x = (*pool)[a];
    const GranularBall& y = (*pool)[b];
    if (x.size() != y.size()) return x.size() < y.size();
    return x.nodes.front() > y.nodes.front();
  }
};

Partition assemble(std::size_t num_nodes, std::vector<GranularBall> balls) {
  std::sort(balls.begin(), balls.end(), [](const GranularBall& a, const GranularBall& b) {
    return a.nodes.front() < b.nodes.front();
  });
  Partition p;
  p.ball_of.assign(num_nodes, kNoCenter);
  for (std::uint32_t i = 0; i < balls.size(); ++i) {
    for (NodeId v : balls[i].nodes) p.ball_of[v] = i;
  }
  p.balls = std::move(balls);
  return p;
}

std::vector<GranularBall> initial_balls(const Graph& g, std::span<const NodeId> component) {
  if (component.size() == 1) {
    return {make_ball(g, std::vector<NodeId>{component.front()})};
  }
  const auto centers = select_initial_centers(g, component);
  return coarse_partition(g, component, centers).balls;
}

std::vector<GranularBall> split_until_pure(const Graph& g, std::vector<GranularBall> pool,
                                           const CoarsenParams& params) {
  std::vector<GranularBall> done;
  std::priority_queue<std::size_t, std::vector<std::size_t>, ImpurityOrder> heap(
      ImpurityOrder{&pool});
  const std::size_t initial = pool.size();
  for (std::size_t i = 0; i < initial; ++i) {
    if (needs_purity_split(pool[i], params.purity_threshold)) {
      heap.push(i);
    } else {
      done.push_back(std::move(pool[i]));
    }
  }
  while (!heap.empty()) {
    const std::size_t idx = heap.top();
    heap.pop();
    auto children = split_ball(g, pool[idx], params.split_rule);
    pool[idx].nodes.clear();
    for (auto& child : children) {
      if (needs_purity_split(child, params.purity_threshold)) {
        pool.push_back(std::move(child));
        heap.push(pool.size() - 1);
      } else {
        done.push_back(std::move(child));
      }
    }
  }
  return done;
}

}  // namespace

std::uint32_t GranularBall::num_labeled() const {
  return std::accumulate(label_counts.begin(), label_counts.end(), 0U);
}

double Partition::ratio() const {
  return ball_of.empty() ? 0.0 : static_cast<double>(balls.size()) / static_cast<double>(ball_of.size());
}

void CoarsenParams::validate() const {
  if (!(purity_threshold > 0.0 && purity_threshold <= 1.0)) {
    throw std::invalid_argument("purity threshold must lie in (0, 1]");
  }
  if (target_ratio && !(*target_ratio > 0.0 && *target_ratio < 1.0)) {
    throw std::invalid_argument("target ratio must lie in (0, 1)");
  }
}

void refresh_statistics(const Graph& g, GranularBall& ball) {
  InducedSubgraph sub(g, ball.nodes);
  ball.nodes.assign(sub.nodes().begin(), sub.nodes().end());
  ball.center = sub.global(max_degree_local(sub));
  refresh_labels(g, ball);
}

double purity(const GranularBall& ball, std::span<const Label> labels, int num_classes) {
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  std::uint32_t total = 0;
  for (NodeId v : ball.nodes) {
    const Label y = labels[v];
    if (y == kUnlabeled) continue;
    ++counts[static_cast<std::size_t>(y)];
    ++total;
  }
  if (total == 0) return 1.0;
  const std::uint32_t top = *std::max_element(counts.begin(), counts.end());
  return static_cast<double>(top) / static_cast<double>(total);
}

std::vector<NodeId> select_initial_centers(const Graph& g, std::span<const NodeId> component) {
  if (component.empty()) throw std::invalid_argument("select_initial_centers: empty component");
  const std::size_t n = component.size();
  const std::size_t alpha = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n)))), 1, n);
  const auto k = static_cast<std::size_t>(g.num_classes());

  auto by_degree = [&g](NodeId a, NodeId b) {
    return g.degree(a) != g.degree(b) ? g.degree(a) > g.degree(b) : a < b;
  };

  std::vector<std::vector<NodeId>> by_class(k);
  for (NodeId v : component) {
    const Label y = g.label(v);
    if (y != kUnlabeled) by_class[static_cast<std::size_t>(y)].push_back(v);
  }

  std::vector<std::size_t> quota(k, k == 0 ? 0 : alpha / k);
  if (k > 0) {
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return by_class[a].size() > by_class[b].size();
    });
    for (std::size_t i = 0; i < alpha % k; ++i) ++quota[order[i]];
  }

  std::vector<NodeId> centers;
  centers.reserve(alpha);
  for (std::size_t c = 0; c < k; ++c) {
    auto& members = by_class[c];
    const std::size_t take = std::min(quota[c], members.size());
    std::partial_sort(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take),
                      members.end(), by_degree);
    centers.insert(centers.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }

  if (centers.size() < alpha) {
    std::vector<NodeId> used = centers;
    std::sort(used.begin(), used.end());
    std::vector<NodeId> pool(component.begin(), component.end());
    std::sort(pool.begin(), pool.end(), by_degree);
    for (NodeId v : pool) {
      if (centers.size() == alpha) break;
      if (!std::binary_search(used.begin(), used.end(), v)) centers.push_back(v);
    }
  }
  return centers;
}

Partition coarse_partition(const Graph& g, std::span<const NodeId> component,
                           std::span<const NodeId> centers) {
  InducedSubgraph sub(g, component);
  std::vector<std::uint32_t> local_centers;
  local_centers.reserve(centers.size());
  for (NodeId c : centers) {
    const std::uint32_t l = sub.local(c);
    if (l == kNoCenter) throw std::invalid_argument("coarse_partition: center outside component");
    local_centers.push_back(l);
  }
  const NearestCenter nearest = multi_source_bfs(sub, local_centers);

  std::vector<std::vector<NodeId>> members(centers.size());
  for (std::uint32_t i = 0; i < sub.size(); ++i) {
    if (nearest.center[i] == kNoCenter) {
      throw std::invalid_argument("coarse_partition: component is not connected");
    }
    members[nearest.center[i]].push_back(sub.global(i));
  }

  Partition p;
  p.ball_of.assign(g.num_nodes(), kNoCenter);
  for (auto& m : members) {
    if (m.empty()) continue;  // repeated center
    const auto idx = static_cast<std::uint32_t>(p.balls.size());
    for (NodeId v : m) p.ball_of[v] = idx;
    p.balls.push_back(make_ball(g, std::move(m)));
  }
  return p;
}

std::vector<GranularBall> split_ball(const Graph& g, const GranularBall& ball, SplitCenterRule rule) {
  if (ball.size() < 2) throw std::invalid_argument("split_ball: ball has fewer than 2 nodes");
  InducedSubgraph sub(g, ball.nodes);

  const std::uint32_t c1 = max_degree_local(sub);
  std::uint32_t c2 = kNoCenter;
  if (rule == SplitCenterRule::LabelDiversity) {
    const Label y1 = g.label(sub.global(c1));
    for (std::uint32_t i = 0; i < sub.size(); ++i) {
      const Label y = g.label(sub.global(i));
      if (i == c1 || y == kUnlabeled || y == y1) continue;
      if (c2 == kNoCenter || sub.degree(i) > sub.degree(c2)) c2 = i;
    }
  }
  if (c2 == kNoCenter) c2 = max_degree_local(sub, c1);

  const std::uint32_t centers[2] = {c1, c2};
  const NearestCenter nearest = multi_source_bfs(sub, centers);

  // Nodes unreachable from both centers only occur in disconnected input;
  // they ride with the first side and are separated by the component pass.
  std::vector<NodeId> side[2];
  for (std::uint32_t i = 0; i < sub.size(); ++i) {
    side[nearest.center[i] == 1 ? 1 : 0].push_back(sub.global(i));
  }

  std::vector<GranularBall> children;
  for (auto& s : side) {
    InducedSubgraph child(g, s);
    auto comps = connected_components(child);
    if (comps.size() == 1) {
      children.push_back(make_ball(g, child));
      continue;
    }
    detail::logger()->debug("split_ball: child of {} nodes decomposed into {} components",
                            s.size(), comps.size());
    for (auto& comp : comps) children.push_back(make_ball(g, std::move(comp)));
  }
  return children;
}

Partition sggbs(const Graph& g, std::span<const NodeId> component, const CoarsenParams& params) {
  params.validate();
  if (component.empty()) return assemble(g.num_nodes(), {});
  auto balls = split_until_pure(g, initial_balls(g, component), params);
  return assemble(g.num_nodes(), std::move(balls));
}

Partition sgbgc(const Graph& g, const CoarsenParams& params) {
  params.validate();
  std::vector<GranularBall> all;
  for (const auto& comp : connected_components(g)) {
    auto balls = split_until_pure(g, initial_balls(g, comp), params);
    std::move(balls.begin(), balls.end(), std::back_inserter(all));
  }
  Partition p = assemble(g.num_nodes(), std::move(all));
  detail::logger()->info("sgbgc: {} balls over {} nodes, ratio {:.4f}", p.num_balls(),
                         p.num_nodes(), p.ratio());
  return p;
}

Partition coarsen_to_ratio(const Graph& g, const CoarsenParams& params) {
  params.validate();
  if (!params.target_ratio) throw std::invalid_argument("coarsen_to_ratio: no target ratio");
  const std::size_t n = g.num_nodes();
  const std::size_t target = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(*params.target_ratio * static_cast<double>(n) - 1e-9)), 1,
      std::max<std::size_t>(n, 1));

  std::vector<GranularBall> pool;
  for (const auto& comp : connected_components(g)) {
    auto balls = initial_balls(g, comp);
    std::move(balls.begin(), balls.end(), std::back_inserter(pool));
  }
  std::size_t count = pool.size();

  std::priority_queue<std::size_t, std::vector<std::size_t>, ImpurityOrder> impure(
      ImpurityOrder{&pool});
  std::priority_queue<std::size_t, std::vector<std::size_t>, SizeOrder> pure(SizeOrder{&pool});
  auto enqueue = [&](std::size_t i) {
    if (needs_purity_split(pool[i], params.purity_threshold)) {
      impure.push(i);
    } else if (pool[i].size() >= 2) {
      pure.push(i);
    }
  };
  for (std::size_t i = 0; i < pool.size(); ++i) enqueue(i);

  while (count < target && !(impure.empty() && pure.empty())) {
    std::size_t idx;
    if (!impure.empty()) {
      idx = impure.top();
      impure.pop();
    } else {
      idx = pure.top();
      pure.pop();
    }
    auto children = split_ball(g, pool[idx], params.split_rule);
    count += children.size() - 1;
    pool[idx].nodes.clear();
    for (auto& child : children) {
      pool.push_back(std::move(child));
      enqueue(pool.size() - 1);
    }
  }

  std::vector<GranularBall> live;
  live.reserve(count);
  for (auto& b : pool) {
    if (!b.nodes.empty()) live.push_back(std::move(b));
  }
  Partition p = assemble(n, std::move(live));
  detail::logger()->info("coarsen_to_ratio: target {} balls, reached {} (ratio {:.4f})", target,
                         p.num_balls(), p.ratio());
  return p;
}

Partition coarsen(const Graph& g, const CoarsenParams& params) {
  return params.target_ratio ? coarsen_to_ratio(g, params) : sgbgc(g, params);
}

Partition partition_from_assignment(const Graph& g, std::vector<std::uint32_t> ball_of) {
  if (ball_of.size() != g.num_nodes()) {
    throw std::invalid_argument("partition covers " + std::to_string(ball_of.size()) +
                                " nodes, graph has " + std::to_string(g.num_nodes()));
  }
  std::uint32_t num_balls = 0;
  for (std::uint32_t b : ball_of) {
    if (b == kNoCenter) throw std::invalid_argument("partition leaves a node unassigned");
    num_balls = std::max(num_balls, b + 1);
  }
  std::vector<std::vector<NodeId>> members(num_balls);
  for (NodeId v = 0; v < ball_of.size(); ++v) members[ball_of[v]].push_back(v);
  Partition p;
  p.balls.reserve(num_balls);
  for (std::uint32_t i = 0; i < num_balls; ++i) {
    if (members[i].empty()) {
      throw std::invalid_argument("partition ball index " + std::to_string(i) + " is empty");
    }
    p.balls.push_back(make_ball(g, std::move(members[i])));
  }
  p.ball_of = std::move(ball_of);
  return p;
}

bool is_valid_partition(const Graph& g, const Partition& p) {
  if (p.ball_of.size() != g.num_nodes()) return false;
  std::size_t covered = 0;
  for (std::uint32_t i = 0; i < p.balls.size(); ++i) {
    const auto& nodes = p.balls[i].nodes;
    if (nodes.empty() || !std::is_sorted(nodes.begin(), nodes.end())) return false;
    if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) return false;
    for (NodeId v : nodes) {
      if (v >= g.num_nodes() || p.ball_of[v] != i) return false;
    }
    if (!std::binary_search(nodes.begin(), nodes.end(), p.balls[i].center)) return false;
    covered += nodes.size();
    InducedSubgraph sub(g, nodes);
    if (connected_components(sub).size() != 1) return false;
  }
  return covered == g.num_nodes();
}

void write_partition(const Partition& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, p.ratio());
  out << "#balls=" << p.num_balls() << " ratio=" << std::string_view(buf, end - buf) << '\n';
  for (NodeId v = 0; v < p.ball_of.size(); ++v) out << v << ' ' << p.ball_of[v] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::uint32_t> read_partition_assignment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file " + path.string());
  std::vector<std::uint32_t> ball_of;
  std::vector<bool> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::uint64_t node = 0;
    std::uint64_t ball = 0;
    if (!(fields >> node >> ball) || ball >= kNoCenter) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed line");
    }
    if (node >= ball_of.size()) {
      ball_of.resize(node + 1, kNoCenter);
      seen.resize(node + 1, false);
    }
    if (seen[node]) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": node " +
                               std::to_string(node) + " assigned twice");
    }
    seen[node] = true;
    ball_of[node] = static_cast<std::uint32_t>(ball);
  }
  return ball_of;
}

}  // namespace gbc
