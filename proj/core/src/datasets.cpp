#include "gbc/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "log.hpp"

namespace gbc {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

/// Splits on '\n', dropping a trailing '\r' per line and the empty tail after a final newline.
std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line, const std::string& what) {
  throw GraphError(file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && first != last;
}

template <typename T>
void append_number(std::string& out, T value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, ptr);
}

std::vector<NodeId> node_array(const json& j, const char* key, std::size_t num_nodes) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw GraphError(std::string("split file lacks array '") + key + "'");
  }
  std::vector<NodeId> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= num_nodes) {
      throw GraphError(std::string("split '") + key + "' holds an invalid node id");
    }
    out.push_back(v.get<NodeId>());
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw GraphError(std::string("split '") + key + "' repeats a node");
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GraphError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw GraphError("write failed: " + path.string());
}

}  // namespace

DatasetManifest DatasetManifest::read(const std::filesystem::path& manifest_path) {
  json j;
  try {
    j = json::parse(slurp(manifest_path));
  } catch (const json::exception& e) {
    throw GraphError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  const auto base = manifest_path.parent_path();
  DatasetManifest m;
  try {
    m.edges = base / j.at("edges").get<std::string>();
    m.features = base / j.at("features").get<std::string>();
    m.labels = base / j.at("labels").get<std::string>();
    m.num_nodes = j.at("num_nodes").get<std::size_t>();
    m.num_features = j.at("num_features").get<std::size_t>();
    m.num_classes = j.at("num_classes").get<int>();
    if (j.contains("split") && !j.at("split").is_null()) m.split = base / j.at("split").get<std::string>();
  } catch (const json::exception& e) {
    throw GraphError("manifest " + manifest_path.string() + ": " + e.what());
  }
  if (m.num_classes < 0) throw GraphError("manifest: num_classes must be non-negative");
  return m;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  const DatasetManifest m = DatasetManifest::read(manifest_path);
  const std::size_t n = m.num_nodes;
  const std::size_t d = m.num_features;
  Dataset out;

  std::vector<Edge> edges;
  {
    const std::string text = slurp(m.edges);
    const auto lines = lines_of(text);
    edges.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string_view line = trim(lines[i]);
      if (line.empty()) continue;
      const std::size_t gap = line.find_first_of(" \t");
      std::uint64_t u = 0;
      std::uint64_t v = 0;
      if (gap == std::string_view::npos || !parse_number(line.substr(0, gap), u) ||
          !parse_number(trim(line.substr(gap)), v)) {
        fail(m.edges, i + 1, "expected two node ids");
      }
      if (u >= n || v >= n) fail(m.edges, i + 1, "node id out of range");
      edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
    out.edge_lines = edges.size();
  }

  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  {
    const std::string text = slurp(m.features);
    const auto lines = lines_of(text);
    if (lines.size() != n) {
      throw GraphError(m.features.filename().string() + ": " + std::to_string(lines.size()) +
                       " rows, manifest declares " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::string_view rest = lines[i];
      std::size_t col = 0;
      while (d > 0) {
        const std::size_t comma = rest.find(',');
        double value = 0.0;
        if (col >= d || !parse_number(trim(rest.substr(0, comma)), value)) {
          fail(m.features, i + 1, col >= d ? "too many columns" : "malformed real");
        }
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col++)) = value;
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (col != d) fail(m.features, i + 1, "expected " + std::to_string(d) + " columns");
      if (d == 0 && !trim(lines[i]).empty()) fail(m.features, i + 1, "expected an empty row");
    }
  }

  std::vector<Label> labels(n);
  {
    const std::string text = slurp(m.labels);
    const auto lines = lines_of(text);
    if (lines.size() != n) {
      throw GraphError(m.labels.filename().string() + ": " + std::to_string(lines.size()) +
                       " rows, manifest declares " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      Label y = 0;
      if (!parse_number(trim(lines[i]), y)) fail(m.labels, i + 1, "malformed label");
      if (y != kUnlabeled && (y < 0 || y >= m.num_classes)) fail(m.labels, i + 1, "label out of range");
      labels[i] = y;
    }
  }

  out.graph = Graph::build(n, edges, std::move(x), std::move(labels), m.num_classes);
  if (m.split) out.split = read_split(*m.split, n);
  detail::logger()->info("loaded {}: N={} M={} d={} k={} labeled={}", manifest_path.string(), n,
                         out.graph.num_edges(), d, m.num_classes, out.graph.num_labeled());
  return out;
}

void export_dataset(const Graph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::string text;
  for (const Edge& e : g.edge_list()) {
    append_number(text, e.u);
    text += ' ';
    append_number(text, e.v);
    text += '\n';
  }
  write_text(dir / "edges.txt", text);

  text.clear();
  const FeatureMatrix& x = g.features();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c > 0) text += ',';
      append_number(text, x(r, c));
    }
    text += '\n';
  }
  write_text(dir / "features.csv", text);

  text.clear();
  for (Label y : g.labels()) {
    append_number(text, y);
    text += '\n';
  }
  write_text(dir / "labels.txt", text);

  const json manifest = {{"edges", "edges.txt"},
                         {"features", "features.csv"},
                         {"labels", "labels.txt"},
                         {"num_nodes", g.num_nodes()},
                         {"num_features", g.num_features()},
                         {"num_classes", g.num_classes()}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

SplitMasks make_split(const Graph& g, std::uint64_t seed) {
  std::vector<NodeId> labeled;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (g.label(v) != kUnlabeled) labeled.push_back(v);
  }
  const std::size_t n = labeled.size();
  if (n < 5) throw std::invalid_argument("make_split: need at least 5 labeled nodes, have " + std::to_string(n));

  std::mt19937_64 rng(seed);
  std::shuffle(labeled.begin(), labeled.end(), rng);

  // Largest remainder over 60/20/20; equal remainders go to the earlier part.
  constexpr std::array<std::size_t, 3> kShare{6, 2, 2};
  std::array<std::size_t, 3> sizes{};
  std::array<std::size_t, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    sizes[i] = n * kShare[i] / 10;
    remainder[i] = n * kShare[i] % 10;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i]];

  SplitMasks s;
  const std::array<std::vector<NodeId>*, 3> parts{&s.train, &s.val, &s.test};
  auto first = labeled.begin();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto last = first + static_cast<std::ptrdiff_t>(sizes[i]);
    parts[i]->assign(first, last);
    std::sort(parts[i]->begin(), parts[i]->end());
    first = last;
  }
  return s;
}

SplitMasks read_split(const std::filesystem::path& path, std::size_t num_nodes) {
  json j;
  try {
    j = json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw GraphError("malformed split file " + path.string() + ": " + e.what());
  }
  SplitMasks s{node_array(j, "train", num_nodes), node_array(j, "val", num_nodes),
               node_array(j, "test", num_nodes)};
  std::vector<NodeId> all;
  for (const auto* part : {&s.train, &s.val, &s.test}) all.insert(all.end(), part->begin(), part->end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw GraphError("split file " + path.string() + ": masks overlap");
  }
  return s;
}

void write_split(const SplitMasks& split, const std::filesystem::path& path) {
  const json j = {{"train", split.train}, {"val", split.val}, {"test", split.test}};
  write_text(path, j.dump() + "\n");
}

std::vector<Label> inject_label_noise(std::span<const Label> labels, int num_classes, double rate,
                                      std::uint64_t seed, std::span<const NodeId> only) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("noise rate must lie in [0, 1]");
  if (num_classes < 2 && rate > 0.0) throw std::invalid_argument("label noise needs at least 2 classes");
  std::vector<Label> out(labels.begin(), labels.end());
  if (rate == 0.0) return out;

  std::vector<bool> eligible(labels.size(), only.empty());
  for (NodeId v : only) {
    if (v >= labels.size()) throw std::invalid_argument("noise subset node out of range");
    eligible[v] = true;
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(rate);
  std::uniform_int_distribution<Label> other(0, num_classes - 2);
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (out[v] == kUnlabeled || !eligible[v]) continue;
    if (!flip(rng)) continue;
    const Label draw = other(rng);
    out[v] = draw >= out[v] ? draw + 1 : draw;
  }
  return out;
}

std::vector<Label> restrict_labels(std::span<const Label> labels, std::span<const NodeId> keep) {
  std::vector<Label> out(labels.size(), kUnlabeled);
  for (NodeId v : keep) {
    if (v >= labels.size()) throw std::invalid_argument("restrict_labels: node out of range");
    out[v] = labels[v];
  }
  return out;
}

}  // namespace gbc
