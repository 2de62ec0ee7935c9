#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aois/model.hpp"

namespace aois {

// Undirected graph over the non-evidence variables. Evidence variables keep
// their vertex ids but are inactive and never carry edges.
struct PrimalGraph {
  int n = 0;
  std::vector<char> active;                 // per variable
  std::vector<std::vector<int>> neighbors;  // sorted adjacency lists

  bool has_edge(int u, int v) const;
  void add_edge(int u, int v);
  int active_count() const;
};

struct EliminationOrder {
  std::vector<int> order;  // permutation of the active variables
};

// Rooted forest over the active variables; a virtual root joins the
// components so the estimate is always a single number. Every primal edge
// connects a node to one of its tree ancestors.
struct PseudoTree {
  static constexpr int kAbsent = -2;

  int n = 0;
  std::vector<int> parent;    // -1 for component roots, kAbsent for inactive
  std::vector<int> roots;     // ascending
  std::vector<std::vector<int>> children;  // ascending
  std::vector<int> preorder;  // DFS order, roots and siblings ascending
  std::vector<int> depth;     // roots at depth 0
  std::vector<int> tin, tout;  // Euler intervals for ancestor queries

  bool contains(int v) const {
    return v >= 0 && v < n && parent[static_cast<std::size_t>(v)] != kAbsent;
  }
  // True when a == d or a is a proper ancestor of d.
  bool is_ancestor_or_self(int a, int d) const {
    return tin[static_cast<std::size_t>(a)] <= tin[static_cast<std::size_t>(d)] &&
           tout[static_cast<std::size_t>(d)] <= tout[static_cast<std::size_t>(a)];
  }

  // Fills children/preorder/depth/tin/tout from `parent`; validates that the
  // parent relation is a forest covering exactly the active variables.
  void finalize(const std::vector<char>& active_vars);
};

// context(X): X itself plus the tree ancestors of X that are adjacent in the
// primal graph to X or to one of X's tree descendants. Ordered X first, then
// ancestors from nearest to root.
struct ContextMap {
  std::vector<std::vector<int>> context;

  int width() const;  // max |context| - 1 over active variables
};

// Connects each CPT's evidence-restricted scope into a clique.
PrimalGraph moral_graph(const BayesianNetwork& net, const Evidence& evidence);

// Repeatedly eliminates a vertex of minimum fill-in. Ties break to the lowest
// id when seed == 0 and uniformly at random otherwise.
EliminationOrder min_fill_order(const PrimalGraph& graph, std::uint64_t seed);

// Reverse topological order of the directed network restricted to active
// variables: children are eliminated before their parents, lowest id first
// among ready vertices. Pseudo-trees built from it place every network parent
// above its child.
EliminationOrder topological_elimination_order(const BayesianNetwork& net,
                                               const Evidence& evidence);

// Bucket-derived pseudo-tree: walking the order backwards, each vertex hangs
// off its earliest-eliminated later neighbor in the induced graph. Throws if
// the result violates the back-arc property (internal consistency check).
PseudoTree pseudo_tree_from_order(const PrimalGraph& graph, const EliminationOrder& order);

// Max over elimination steps of the eliminated vertex's remaining-neighbor
// count in the induced graph.
int induced_width(const PrimalGraph& graph, const EliminationOrder& order);

ContextMap compute_contexts(const PseudoTree& tree, const PrimalGraph& graph);

// Pseudo-tree file: lines "root R" and "child parent". Validates coverage of
// the active variables and the back-arc property against `graph`.
PseudoTree parse_pseudo_tree(std::string_view text, const PrimalGraph& graph);
PseudoTree load_pseudo_tree(const std::string& path, const PrimalGraph& graph);
void serialize_pseudo_tree(const PseudoTree& tree, std::ostream& os);

}  // namespace aois
