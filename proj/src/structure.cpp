#include "aois/structure.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "aois/error.hpp"
#include "aois/rng.hpp"
#include "text_io.hpp"

namespace aois {

namespace {

// Induced-graph walk shared by induced_width and pseudo_tree_from_order:
// eliminates vertices in order, connecting each vertex's remaining neighbors.
// Calls visit(v, remaining_neighbors) before the clique is added.
template <typename Visit>
void eliminate_along(const PrimalGraph& graph, const EliminationOrder& order,
                     Visit&& visit) {
  const int n = graph.n;
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    adj[static_cast<std::size_t>(v)].insert(graph.neighbors[static_cast<std::size_t>(v)].begin(),
                                            graph.neighbors[static_cast<std::size_t>(v)].end());
  for (int v : order.order) {
    auto& nb = adj[static_cast<std::size_t>(v)];
    visit(v, nb);
    for (auto it = nb.begin(); it != nb.end(); ++it) {
      auto jt = it;
      for (++jt; jt != nb.end(); ++jt) {
        adj[static_cast<std::size_t>(*it)].insert(*jt);
        adj[static_cast<std::size_t>(*jt)].insert(*it);
      }
    }
    for (int u : nb) adj[static_cast<std::size_t>(u)].erase(v);
    nb.clear();
  }
}

void check_permutation(const PrimalGraph& graph, const EliminationOrder& order) {
  std::vector<char> seen(static_cast<std::size_t>(graph.n), 0);
  int active = 0;
  for (int v : order.order) {
    if (v < 0 || v >= graph.n || !graph.active[static_cast<std::size_t>(v)] ||
        seen[static_cast<std::size_t>(v)])
      throw ConfigError("elimination order is not a permutation of the active variables");
    seen[static_cast<std::size_t>(v)] = 1;
    ++active;
  }
  if (active != graph.active_count())
    throw ConfigError("elimination order misses active variables");
}

}  // namespace

bool PrimalGraph::has_edge(int u, int v) const {
  const auto& nb = neighbors[static_cast<std::size_t>(u)];
  return std::binary_search(nb.begin(), nb.end(), v);
}

void PrimalGraph::add_edge(int u, int v) {
  if (u == v || has_edge(u, v)) return;
  auto& nu = neighbors[static_cast<std::size_t>(u)];
  nu.insert(std::upper_bound(nu.begin(), nu.end(), v), v);
  auto& nv = neighbors[static_cast<std::size_t>(v)];
  nv.insert(std::upper_bound(nv.begin(), nv.end(), u), u);
}

int PrimalGraph::active_count() const {
  int c = 0;
  for (char a : active) c += a ? 1 : 0;
  return c;
}

PrimalGraph moral_graph(const BayesianNetwork& net, const Evidence& evidence) {
  PrimalGraph g;
  g.n = net.num_vars();
  g.active.resize(static_cast<std::size_t>(g.n));
  g.neighbors.resize(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v)
    g.active[static_cast<std::size_t>(v)] = evidence.observed(v) ? 0 : 1;

  // Clique over each CPT's evidence-restricted scope.
  std::vector<int> scope;
  for (const Cpt& cpt : net.cpts()) {
    scope.clear();
    if (!evidence.observed(cpt.child)) scope.push_back(cpt.child);
    for (int p : cpt.parents)
      if (!evidence.observed(p)) scope.push_back(p);
    for (std::size_t i = 0; i < scope.size(); ++i)
      for (std::size_t j = i + 1; j < scope.size(); ++j) g.add_edge(scope[i], scope[j]);
  }
  return g;
}

EliminationOrder min_fill_order(const PrimalGraph& graph, std::uint64_t seed) {
  const int n = graph.n;
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  std::vector<int> remaining;
  for (int v = 0; v < n; ++v) {
    if (!graph.active[static_cast<std::size_t>(v)]) continue;
    remaining.push_back(v);
    adj[static_cast<std::size_t>(v)].insert(graph.neighbors[static_cast<std::size_t>(v)].begin(),
                                            graph.neighbors[static_cast<std::size_t>(v)].end());
  }

  Philox rng(seed, 0);
  EliminationOrder result;
  result.order.reserve(remaining.size());

  while (!remaining.empty()) {
    long long best_fill = -1;
    std::vector<int> best;
    for (int v : remaining) {
      const auto& nb = adj[static_cast<std::size_t>(v)];
      long long fill = 0;
      for (auto it = nb.begin(); it != nb.end(); ++it) {
        auto jt = it;
        for (++jt; jt != nb.end(); ++jt)
          if (!adj[static_cast<std::size_t>(*it)].count(*jt)) ++fill;
      }
      if (best_fill < 0 || fill < best_fill) {
        best_fill = fill;
        best.assign(1, v);
      } else if (fill == best_fill) {
        best.push_back(v);
      }
    }
    int pick = best.front();  // lowest id: `remaining` stays sorted
    if (seed != 0 && best.size() > 1)
      pick = best[static_cast<std::size_t>(rng.uniform() * static_cast<double>(best.size()))];

    auto& nb = adj[static_cast<std::size_t>(pick)];
    for (auto it = nb.begin(); it != nb.end(); ++it) {
      auto jt = it;
      for (++jt; jt != nb.end(); ++jt) {
        adj[static_cast<std::size_t>(*it)].insert(*jt);
        adj[static_cast<std::size_t>(*jt)].insert(*it);
      }
    }
    for (int u : nb) adj[static_cast<std::size_t>(u)].erase(pick);
    nb.clear();
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
    result.order.push_back(pick);
  }
  return result;
}

EliminationOrder topological_elimination_order(const BayesianNetwork& net,
                                               const Evidence& evidence) {
  const int n = net.num_vars();
  // Kahn over the active subgraph, repeatedly removing the lowest-id sink so
  // children always precede their parents in the order.
  std::vector<int> out_deg(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> parents_of(static_cast<std::size_t>(n));
  for (int child = 0; child < n; ++child) {
    if (evidence.observed(child)) continue;
    for (int p : net.cpt(child).parents) {
      if (evidence.observed(p)) continue;
      parents_of[static_cast<std::size_t>(child)].push_back(p);
      ++out_deg[static_cast<std::size_t>(p)];
    }
  }
  std::set<int> ready;
  for (int v = 0; v < n; ++v)
    if (!evidence.observed(v) && out_deg[static_cast<std::size_t>(v)] == 0) ready.insert(v);

  EliminationOrder result;
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    result.order.push_back(v);
    for (int p : parents_of[static_cast<std::size_t>(v)])
      if (--out_deg[static_cast<std::size_t>(p)] == 0) ready.insert(p);
  }
  return result;
}

void PseudoTree::finalize(const std::vector<char>& active_vars) {
  const int nn = n;
  children.assign(static_cast<std::size_t>(nn), {});
  roots.clear();
  for (int v = 0; v < nn; ++v) {
    const int p = parent[static_cast<std::size_t>(v)];
    if (p == kAbsent) {
      if (active_vars[static_cast<std::size_t>(v)])
        throw ConfigError("pseudo-tree: active variable " + std::to_string(v) + " missing");
      continue;
    }
    if (!active_vars[static_cast<std::size_t>(v)])
      throw ConfigError("pseudo-tree: inactive variable " + std::to_string(v) + " present");
    if (p == -1) {
      roots.push_back(v);
    } else {
      if (p < 0 || p >= nn || parent[static_cast<std::size_t>(p)] == kAbsent)
        throw ConfigError("pseudo-tree: bad parent for variable " + std::to_string(v));
      children[static_cast<std::size_t>(p)].push_back(v);
    }
  }
  std::sort(roots.begin(), roots.end());
  for (auto& c : children) std::sort(c.begin(), c.end());

  preorder.clear();
  depth.assign(static_cast<std::size_t>(nn), -1);
  tin.assign(static_cast<std::size_t>(nn), 0);
  tout.assign(static_cast<std::size_t>(nn), 0);
  int clock = 0;
  // Iterative DFS; entries are (vertex, next child index).
  std::vector<std::pair<int, std::size_t>> stack;
  for (int r : roots) {
    if (depth[static_cast<std::size_t>(r)] >= 0)
      throw ConfigError("pseudo-tree: cycle reaches root " + std::to_string(r));
    depth[static_cast<std::size_t>(r)] = 0;
    tin[static_cast<std::size_t>(r)] = clock++;
    preorder.push_back(r);
    stack.emplace_back(r, 0);
    while (!stack.empty()) {
      auto& [v, ci] = stack.back();
      const auto& ch = children[static_cast<std::size_t>(v)];
      if (ci == ch.size()) {
        tout[static_cast<std::size_t>(v)] = clock++;
        stack.pop_back();
        continue;
      }
      const int c = ch[ci++];
      if (depth[static_cast<std::size_t>(c)] >= 0)
        throw ConfigError("pseudo-tree: not a forest (vertex " + std::to_string(c) +
                          " reached twice)");
      depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(v)] + 1;
      tin[static_cast<std::size_t>(c)] = clock++;
      preorder.push_back(c);
      stack.emplace_back(c, 0);
    }
  }
  for (int v = 0; v < nn; ++v)
    if (parent[static_cast<std::size_t>(v)] != kAbsent && depth[static_cast<std::size_t>(v)] < 0)
      throw ConfigError("pseudo-tree: unreachable vertex " + std::to_string(v) +
                        " (parent cycle)");
}

namespace {

void check_back_arc(const PseudoTree& tree, const PrimalGraph& graph, const char* what) {
  for (int u = 0; u < graph.n; ++u)
    for (int v : graph.neighbors[static_cast<std::size_t>(u)]) {
      if (v < u) continue;
      if (!tree.is_ancestor_or_self(u, v) && !tree.is_ancestor_or_self(v, u))
        throw ConfigError(std::string(what) + ": edge (" + std::to_string(u) + "," +
                          std::to_string(v) + ") is not a back-arc");
    }
}

}  // namespace

PseudoTree pseudo_tree_from_order(const PrimalGraph& graph, const EliminationOrder& order) {
  check_permutation(graph, order);
  const int n = graph.n;
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < order.order.size(); ++i)
    pos[static_cast<std::size_t>(order.order[i])] = static_cast<int>(i);

  PseudoTree tree;
  tree.n = n;
  tree.parent.assign(static_cast<std::size_t>(n), PseudoTree::kAbsent);

  // When v is eliminated, every surviving neighbor is later in the order;
  // the one eliminated soonest becomes v's tree parent.
  eliminate_along(graph, order, [&](int v, const std::set<int>& nb) {
    int parent = -1;
    for (int u : nb)
      if (parent == -1 || pos[static_cast<std::size_t>(u)] < pos[static_cast<std::size_t>(parent)])
        parent = u;
    tree.parent[static_cast<std::size_t>(v)] = parent;
  });

  tree.finalize(graph.active);
  check_back_arc(tree, graph, "pseudo_tree_from_order internal check");
  return tree;
}

int induced_width(const PrimalGraph& graph, const EliminationOrder& order) {
  check_permutation(graph, order);
  int width = 0;
  eliminate_along(graph, order, [&](int, const std::set<int>& nb) {
    width = std::max(width, static_cast<int>(nb.size()));
  });
  return width;
}

ContextMap compute_contexts(const PseudoTree& tree, const PrimalGraph& graph) {
  const int n = tree.n;
  ContextMap cm;
  cm.context.resize(static_cast<std::size_t>(n));

  // needed[v]: proper ancestors of v adjacent to v or to a descendant of v.
  // Children merge into parents, so process in reverse preorder.
  std::vector<std::set<int>> needed(static_cast<std::size_t>(n));
  for (auto it = tree.preorder.rbegin(); it != tree.preorder.rend(); ++it) {
    const int v = *it;
    auto& need = needed[static_cast<std::size_t>(v)];
    for (int u : graph.neighbors[static_cast<std::size_t>(v)])
      if (tree.is_ancestor_or_self(u, v) && u != v) need.insert(u);
    for (int c : tree.children[static_cast<std::size_t>(v)])
      for (int a : needed[static_cast<std::size_t>(c)])
        if (a != v) need.insert(a);

    auto& ctx = cm.context[static_cast<std::size_t>(v)];
    ctx.push_back(v);
    for (int a = tree.parent[static_cast<std::size_t>(v)]; a >= 0;
         a = tree.parent[static_cast<std::size_t>(a)])
      if (need.count(a)) ctx.push_back(a);  // nearest ancestor first
  }
  return cm;
}

int ContextMap::width() const {
  int w = 0;
  for (const auto& c : context)
    if (!c.empty()) w = std::max(w, static_cast<int>(c.size()) - 1);
  return w;
}

PseudoTree parse_pseudo_tree(std::string_view text, const PrimalGraph& graph) {
  detail::TokenReader in(text, "pseudo-tree");
  PseudoTree tree;
  tree.n = graph.n;
  tree.parent.assign(static_cast<std::size_t>(graph.n), PseudoTree::kAbsent);

  auto check_var = [&](long long v) {
    if (v < 0 || v >= graph.n)
      throw ParseError("pseudo-tree: variable " + std::to_string(v) + " out of range");
    if (!graph.active[static_cast<std::size_t>(v)])
      throw ParseError("pseudo-tree: variable " + std::to_string(v) + " is observed");
    if (tree.parent[static_cast<std::size_t>(v)] != PseudoTree::kAbsent)
      throw ParseError("pseudo-tree: variable " + std::to_string(v) + " listed twice");
    return static_cast<int>(v);
  };

  while (!in.at_end()) {
    const std::string_view tok = in.next("'root' or child id");
    if (tok == "root") {
      const int r = check_var(in.next_int("root id"));
      tree.parent[static_cast<std::size_t>(r)] = -1;
    } else {
      long long child = 0;
      {
        std::string buf(tok);
        char* end = nullptr;
        child = std::strtoll(buf.c_str(), &end, 10);
        if (end != buf.c_str() + buf.size())
          throw ParseError("pseudo-tree: expected 'root' or child id, got '" + buf + "'");
      }
      const int c = check_var(child);
      const long long p = in.next_int("parent id");
      if (p < 0 || p >= graph.n || !graph.active[static_cast<std::size_t>(p)])
        throw ParseError("pseudo-tree: parent " + std::to_string(p) + " out of range");
      tree.parent[static_cast<std::size_t>(c)] = static_cast<int>(p);
    }
  }

  try {
    tree.finalize(graph.active);
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  check_back_arc(tree, graph, "pseudo-tree file");
  return tree;
}

PseudoTree load_pseudo_tree(const std::string& path, const PrimalGraph& graph) {
  return parse_pseudo_tree(detail::read_file(path, "pseudo-tree"), graph);
}

void serialize_pseudo_tree(const PseudoTree& tree, std::ostream& os) {
  for (int r : tree.roots) os << "root " << r << "\n";
  for (int v = 0; v < tree.n; ++v) {
    const int p = tree.parent[static_cast<std::size_t>(v)];
    if (p >= 0) os << v << " " << p << "\n";
  }
}

}  // namespace aois
