#include "glide/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "glide/error.hpp"
#include "glide/rng.hpp"

namespace glide {

Dag::Dag(std::vector<std::string> names, std::vector<Edge> edges)
    : names_(std::move(names)), edges_(std::move(edges)) {
  const int d = size();
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto [u, v] = edges_[i];
    if (u < 0 || u >= d || v < 0 || v >= d) {
      throw Error(ErrorKind::UnknownNode, "edge endpoint out of range");
    }
    if (u == v) throw Error(ErrorKind::CycleDetected, "self-loop on " + names_[u]);
    if (i > 0 && edges_[i - 1] == edges_[i]) {
      throw Error(ErrorKind::DuplicateEdge, names_[u] + " -> " + names_[v]);
    }
  }
  parents_.assign(d, {});
  children_.assign(d, {});
  for (const auto& [u, v] : edges_) {
    children_[u].push_back(v);
    parents_[v].push_back(u);
  }
  for (auto& p : parents_) std::sort(p.begin(), p.end());

  // Kahn's algorithm; smallest ready index first so the order is canonical.
  std::vector<int> indegree(d);
  for (int v = 0; v < d; ++v) indegree[v] = static_cast<int>(parents_[v].size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < d; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  topo_.reserve(d);
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (int c : children_[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(topo_.size()) != d) {
    throw Error(ErrorKind::CycleDetected, "graph contains a directed cycle");
  }
}

Dag Dag::empty(int d) { return from_indices(d, {}); }

Dag Dag::from_indices(int d, std::vector<Edge> edges) {
  std::vector<std::string> names;
  names.reserve(d);
  for (int i = 0; i < d; ++i) names.push_back("X" + std::to_string(i));
  return Dag(std::move(names), std::move(edges));
}

bool Dag::has_edge(NodeId parent, NodeId child) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{parent, child});
}

NodeSet Dag::spouses(NodeId v) const {
  NodeSet out;
  for (NodeId c : children(v)) {
    for (NodeId p : parents_[c]) {
      if (p != v) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

NodeSet reach(const std::vector<NodeSet>& adjacency, NodeId start) {
  std::vector<char> seen(adjacency.size(), 0);
  std::vector<NodeId> stack{start};
  NodeSet out;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        out.push_back(w);
        stack.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_node(const Dag& dag, NodeId v) {
  if (v < 0 || v >= dag.size()) {
    throw Error(ErrorKind::NodeOutOfRange, "node " + std::to_string(v));
  }
}

}  // namespace

NodeSet Dag::descendants(NodeId v) const { return reach(children_, v); }
NodeSet Dag::ancestors(NodeId v) const { return reach(parents_, v); }

Dag dag_from_edges(const std::vector<std::string>& names,
                   const std::vector<std::pair<std::string, std::string>>& edges) {
  std::unordered_map<std::string, NodeId> index;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!index.emplace(names[i], static_cast<NodeId>(i)).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate node name " + names[i]);
    }
  }
  auto lookup = [&](const std::string& n) {
    auto it = index.find(n);
    if (it == index.end()) throw Error(ErrorKind::UnknownNode, n);
    return it->second;
  };
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& [p, c] : edges) out.emplace_back(lookup(p), lookup(c));
  return Dag(names, std::move(out));
}

NodeSet sources(const Dag& dag) {
  NodeSet out;
  for (int v = 0; v < dag.size(); ++v) {
    if (dag.parents(v).empty()) out.push_back(v);
  }
  return out;
}

bool d_separated(const Dag& dag, NodeId x, NodeId y, std::span<const NodeId> z) {
  check_node(dag, x);
  check_node(dag, y);
  const int d = dag.size();
  std::vector<char> in_z(d, 0);
  for (NodeId v : z) {
    check_node(dag, v);
    in_z[v] = 1;
  }
  if (x == y) return false;
  if (in_z[x] || in_z[y]) return true;

  // Ancestors of z (inclusive): colliders there are active.
  std::vector<char> anc_z(d, 0);
  std::vector<NodeId> stack(z.begin(), z.end());
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (anc_z[v]) continue;
    anc_z[v] = 1;
    for (NodeId p : dag.parents(v)) stack.push_back(p);
  }

  // State (v, up) means v was entered from a child; (v, down) from a parent.
  std::vector<char> visited_up(d, 0), visited_down(d, 0);
  std::vector<std::pair<NodeId, bool>> queue{{x, true}};
  while (!queue.empty()) {
    const auto [v, up] = queue.back();
    queue.pop_back();
    if (up ? visited_up[v] : visited_down[v]) continue;
    (up ? visited_up : visited_down)[v] = 1;
    if (v == y && !in_z[v]) return false;
    if (up) {
      if (in_z[v]) continue;
      for (NodeId p : dag.parents(v)) queue.emplace_back(p, true);
      for (NodeId c : dag.children(v)) queue.emplace_back(c, false);
    } else {
      if (!in_z[v]) {
        for (NodeId c : dag.children(v)) queue.emplace_back(c, false);
      }
      if (anc_z[v]) {
        for (NodeId p : dag.parents(v)) queue.emplace_back(p, true);
      }
    }
  }
  return true;
}

NodeSet true_markov_blanket(const Dag& dag, NodeId x) {
  check_node(dag, x);
  NodeSet out = dag.parents(x);
  out.insert(out.end(), dag.children(x).begin(), dag.children(x).end());
  const NodeSet sp = dag.spouses(x);
  out.insert(out.end(), sp.begin(), sp.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

BiGraph::BiGraph(std::vector<NodeId> node_ids)
    : node_ids_(std::move(node_ids)),
      adj_(node_ids_.size() * node_ids_.size(), 0),
      neighbors_(node_ids_.size()) {}

void BiGraph::add_edge(int u, int v) {
  const int n = size();
  if (u < 0 || v < 0 || u >= n || v >= n) {
    throw Error(ErrorKind::NodeOutOfRange, "bigraph vertex out of range");
  }
  if (u == v) throw Error(ErrorKind::InvalidArgument, "bigraph self-loop");
  if (adjacent(u, v)) return;
  adj_[static_cast<std::size_t>(u) * n + v] = 1;
  adj_[static_cast<std::size_t>(v) * n + u] = 1;
  auto insert_sorted = [](std::vector<int>& list, int w) {
    list.insert(std::upper_bound(list.begin(), list.end(), w), w);
  };
  insert_sorted(neighbors_[u], v);
  insert_sorted(neighbors_[v], u);
}

std::size_t BiGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& n : neighbors_) total += n.size();
  return total / 2;
}

Degeneracy degeneracy(const BiGraph& g) {
  const int n = g.size();
  Degeneracy out;
  out.ordering.reserve(n);
  std::vector<int> degree(n);
  std::vector<char> removed(n, 0);
  for (int v = 0; v < n; ++v) degree[v] = g.degree(v);
  // Bucket queue keyed by current degree.
  std::vector<std::vector<int>> buckets(std::max(n, 1));
  for (int v = 0; v < n; ++v) buckets[degree[v]].push_back(v);
  int cursor = 0;
  for (int step = 0; step < n; ++step) {
    cursor = std::max(cursor - 1, 0);
    int v = -1;
    while (v < 0) {
      auto& bucket = buckets[cursor];
      while (!bucket.empty()) {
        const int cand = bucket.back();
        bucket.pop_back();
        if (!removed[cand] && degree[cand] == cursor) {
          v = cand;
          break;
        }
      }
      if (v < 0) ++cursor;
    }
    removed[v] = 1;
    out.p = std::max(out.p, cursor);
    out.ordering.push_back(v);
    for (int w : g.neighbors(v)) {
      if (!removed[w]) buckets[--degree[w]].push_back(w);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

GraphKind parse_graph_kind(std::string_view text) {
  if (text == "erdos_renyi" || text == "er") return GraphKind::ErdosRenyi;
  if (text == "scale_free" || text == "sf") return GraphKind::ScaleFree;
  if (text == "bipartite" || text == "bp") return GraphKind::Bipartite;
  throw Error(ErrorKind::InvalidArgument, "unknown graph kind '" + std::string(text) + "'");
}

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::ErdosRenyi: return "erdos_renyi";
    case GraphKind::ScaleFree: return "scale_free";
    case GraphKind::Bipartite: return "bipartite";
  }
  return "unknown";
}

namespace {

// Floyd's algorithm: `count` distinct values from [0, total), sorted.
std::vector<std::uint64_t> sample_distinct(std::uint64_t total, std::uint64_t count, Rng& rng) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = total - count; j < total; ++j) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> erdos_renyi_edges(int d, std::size_t e, Rng& rng) {
  const std::uint64_t total = static_cast<std::uint64_t>(d) * (d - 1) / 2;
  if (e > total) {
    throw Error(ErrorKind::InfeasibleEdgeCount,
                std::to_string(e) + " edges requested, at most " + std::to_string(total));
  }
  std::vector<Edge> edges;
  edges.reserve(e);
  // Index k enumerates upper-triangular pairs row by row.
  std::uint64_t row_start = 0;
  int row = 0;
  for (std::uint64_t k : sample_distinct(total, e, rng)) {
    while (k >= row_start + static_cast<std::uint64_t>(d - 1 - row)) {
      row_start += static_cast<std::uint64_t>(d - 1 - row);
      ++row;
    }
    edges.emplace_back(row, row + 1 + static_cast<int>(k - row_start));
  }
  return edges;
}

std::vector<Edge> scale_free_edges(int d, std::size_t e, double power, Rng& rng) {
  const std::uint64_t total = static_cast<std::uint64_t>(d) * (d - 1) / 2;
  if (e > total) {
    throw Error(ErrorKind::InfeasibleEdgeCount,
                std::to_string(e) + " edges requested, at most " + std::to_string(total));
  }
  std::vector<Edge> edges;
  edges.reserve(e);
  std::vector<double> degree(d, 0.0);
  std::size_t remaining = e;
  for (int i = 1; i < d && remaining > 0; ++i) {
    // Spread the remaining budget evenly over the nodes still to come; node
    // i can attach to at most i predecessors.
    const std::size_t left_nodes = static_cast<std::size_t>(d - i);
    const std::size_t target = (remaining + left_nodes - 1) / left_nodes;
    const std::size_t k = std::min<std::size_t>(target, static_cast<std::size_t>(i));
    std::vector<double> weight(i);
    for (int j = 0; j < i; ++j) weight[j] = std::pow(degree[j] + 1.0, power);
    for (std::size_t pick = 0; pick < k; ++pick) {
      std::discrete_distribution<int> choose(weight.begin(), weight.end());
      const int j = choose(rng);
      weight[j] = 0.0;
      edges.emplace_back(j, i);
    }
    for (std::size_t pick = edges.size() - k; pick < edges.size(); ++pick) {
      degree[edges[pick].first] += 1.0;
      degree[i] += 1.0;
    }
    remaining -= k;
  }
  if (remaining != 0) {
    throw Error(ErrorKind::InfeasibleEdgeCount, "scale-free budget could not be placed");
  }
  return edges;
}

std::vector<Edge> bipartite_edges(int d, std::size_t e, int top, Rng& rng) {
  if (top < 0) top = (d + 1) / 2;
  if (top > d) throw Error(ErrorKind::InvalidArgument, "bipartite top layer larger than d");
  const int bottom = d - top;
  const std::uint64_t total = static_cast<std::uint64_t>(top) * bottom;
  if (e > total) {
    throw Error(ErrorKind::InfeasibleEdgeCount,
                std::to_string(e) + " edges requested, at most " + std::to_string(total) +
                    " for a " + std::to_string(top) + "/" + std::to_string(bottom) + " split");
  }
  std::vector<Edge> edges;
  edges.reserve(e);
  for (std::uint64_t k : sample_distinct(total, e, rng)) {
    edges.emplace_back(static_cast<int>(k / bottom), top + static_cast<int>(k % bottom));
  }
  return edges;
}

}  // namespace

Dag gen_random_dag(GraphKind kind, int d, std::size_t e, std::uint64_t seed,
                   const GeneratorOptions& options) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "d must be >= 1");
  Rng rng(seed);
  std::vector<Edge> edges;
  switch (kind) {
    case GraphKind::ErdosRenyi: edges = erdos_renyi_edges(d, e, rng); break;
    case GraphKind::ScaleFree: edges = scale_free_edges(d, e, options.attach_power, rng); break;
    case GraphKind::Bipartite: edges = bipartite_edges(d, e, options.bipartite_top, rng); break;
  }
  std::vector<NodeId> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (auto& [u, v] : edges) {
    u = perm[u];
    v = perm[v];
  }
  return Dag::from_indices(d, std::move(edges));
}

// ---------------------------------------------------------------------------

void write_edge_list(std::ostream& out, const Dag& dag) {
  out << "# nodes: ";
  for (int v = 0; v < dag.size(); ++v) {
    if (v) out << ',';
    out << dag.name(v);
  }
  out << '\n';
  for (const auto& [p, c] : dag.edges()) out << dag.name(p) << '\t' << dag.name(c) << '\n';
}

Dag read_edge_list(std::istream& in) {
  std::string line;
  constexpr std::string_view kHeader = "# nodes:";
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0) {
    throw Error(ErrorKind::ParseError, "missing '# nodes:' header");
  }
  std::string list = line.substr(kHeader.size());
  if (!list.empty() && list.front() == ' ') list.erase(0, 1);
  std::vector<std::string> names;
  if (!list.empty()) {
    std::stringstream ss(list);
    std::string name;
    while (std::getline(ss, name, ',')) names.push_back(name);
  }
  std::vector<std::pair<std::string, std::string>> edges;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected parent<TAB>child");
    }
    edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return dag_from_edges(names, edges);
}

void save_edge_list(const std::string& path, const Dag& dag) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  write_edge_list(out, dag);
}

Dag load_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  return read_edge_list(in);
}

}  // namespace glide
