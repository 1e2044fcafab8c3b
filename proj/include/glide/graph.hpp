#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace glide {

using NodeId = int;
using NodeSet = std::vector<NodeId>;  // kept sorted ascending, no duplicates
using Edge = std::pair<NodeId, NodeId>;  // (parent, child)

/// Immutable directed acyclic graph over named nodes.
///
/// Construction validates acyclicity (topological sort), node ranges, self
/// loops and duplicate edges. Edges are stored sorted by (parent, child).
class Dag {
 public:
  Dag() = default;
  Dag(std::vector<std::string> names, std::vector<Edge> edges);

  /// Isolated nodes named X0..X{d-1}.
  static Dag empty(int d);
  /// Same as the constructor but nodes are named X0..X{d-1}.
  static Dag from_indices(int d, std::vector<Edge> edges);

  int size() const { return static_cast<int>(names_.size()); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(NodeId v) const { return names_.at(v); }
  const std::vector<Edge>& edges() const { return edges_; }
  const NodeSet& parents(NodeId v) const { return parents_.at(v); }
  const NodeSet& children(NodeId v) const { return children_.at(v); }
  const std::vector<NodeId>& topological_order() const { return topo_; }
  bool has_edge(NodeId parent, NodeId child) const;

  /// Parents of children of v, excluding v.
  NodeSet spouses(NodeId v) const;
  NodeSet descendants(NodeId v) const;
  NodeSet ancestors(NodeId v) const;

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.names_ == b.names_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
  std::vector<NodeId> topo_;
};

/// Builds a Dag from named endpoints. Throws UnknownNode, DuplicateEdge or
/// CycleDetected.
Dag dag_from_edges(const std::vector<std::string>& names,
                   const std::vector<std::pair<std::string, std::string>>& edges);

NodeSet sources(const Dag& dag);

/// True iff x and y are d-separated given z. Uses active-trail reachability
/// (Bayes ball), linear in the size of the graph.
bool d_separated(const Dag& dag, NodeId x, NodeId y, std::span<const NodeId> z);

/// Pa ∪ Ch ∪ Sp of x.
NodeSet true_markov_blanket(const Dag& dag, NodeId x);

/// Undirected simple graph over a subset of variables. Local vertex k stands
/// for variable node_ids[k].
class BiGraph {
 public:
  BiGraph() = default;
  explicit BiGraph(std::vector<NodeId> node_ids);

  void add_edge(int u, int v);  // local indices
  int size() const { return static_cast<int>(node_ids_.size()); }
  const std::vector<NodeId>& node_ids() const { return node_ids_; }
  bool adjacent(int u, int v) const { return adj_[static_cast<std::size_t>(u) * node_ids_.size() + v] != 0; }
  const std::vector<int>& neighbors(int u) const { return neighbors_.at(u); }
  int degree(int u) const { return static_cast<int>(neighbors_.at(u).size()); }
  std::size_t edge_count() const;

 private:
  std::vector<NodeId> node_ids_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<int>> neighbors_;
};

struct Degeneracy {
  int p = 0;
  std::vector<int> ordering;  // local indices in removal order
};

/// Smallest p such that every subgraph has a vertex of degree <= p, with the
/// min-degree removal order that certifies it.
Degeneracy degeneracy(const BiGraph& g);

enum class GraphKind { ErdosRenyi, ScaleFree, Bipartite };

GraphKind parse_graph_kind(std::string_view text);
std::string_view to_string(GraphKind kind);

struct GeneratorOptions {
  /// Preferential-attachment exponent: weight of an existing node is
  /// (degree + 1)^attach_power.
  double attach_power = 1.0;
  /// Size of the parent layer for bipartite graphs; -1 means ceil(d/2).
  int bipartite_top = -1;
};

/// Random DAG with exactly e edges. Node labels are randomly permuted so
/// indices carry no information about causal order.
Dag gen_random_dag(GraphKind kind, int d, std::size_t e, std::uint64_t seed,
                   const GeneratorOptions& options = {});

/// Plain-text edge list: a `# nodes: a,b,c` header then one `parent\tchild`
/// line per edge in (parent, child) index order.
void write_edge_list(std::ostream& out, const Dag& dag);
Dag read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const Dag& dag);
Dag load_edge_list(const std::string& path);

}  // namespace glide
