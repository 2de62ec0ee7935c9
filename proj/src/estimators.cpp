#include "aois/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "aois/error.hpp"

namespace aois {

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::is: return "is";
    case EstimatorKind::aotree: return "aotree";
    case EstimatorKind::aograph: return "aograph";
  }
  return "?";
}

double is_mean(const std::vector<std::pair<double, double>>& log_f_log_q) {
  IsMeanAccumulator acc;
  for (const auto& [lf, lq] : log_f_log_q) acc.add(lf, lq);
  return acc.log_mean();
}

namespace {

// 64-bit mix of a value tuple, used to bucket context keys; buckets keep the
// full tuples, so hash collisions cost time, never correctness.
std::uint64_t mix_key(const std::vector<int>& key) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (int v : key) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ull +
         (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
  }
  return h;
}

constexpr double kWeightMatchTol = 1e-12;

}  // namespace

SampleStore::SampleStore(StoreKind kind, const BayesianNetwork& net,
                         const Evidence& evidence, const PseudoTree& tree,
                         const ContextMap& contexts, const ScopePartition& partition,
                         const FactoredProposal& proposal)
    : merge_by_context_(kind == StoreKind::graph),
      net_(net),
      evidence_(evidence),
      tree_(tree),
      contexts_(contexts),
      partition_(partition),
      proposal_(proposal) {
  const std::size_t n = static_cast<std::size_t>(net.num_vars());
  scratch_values_.assign(n, -1);
  for (const auto& [var, value] : evidence.items())
    scratch_values_[static_cast<std::size_t>(var)] = value;
  if (merge_by_context_) merge_index_.resize(n);
  for (int r : tree_.roots) root_or_.push_back(new_or_node(r));
}

std::uint32_t SampleStore::new_or_node(int var) {
  OrNode node;
  node.var = var;
  node.arcs.resize(static_cast<std::size_t>(net_.cardinality(var)));
  or_nodes_.push_back(std::move(node));
  return static_cast<std::uint32_t>(or_nodes_.size() - 1);
}

std::uint32_t SampleStore::new_and_node(int var, int value) {
  AndNode node;
  node.var = var;
  node.value = value;
  const auto& kids = tree_.children[static_cast<std::size_t>(var)];
  node.or_children.reserve(kids.size());
  for (int c : kids) node.or_children.push_back(new_or_node(c));
  and_nodes_.push_back(std::move(node));
  return static_cast<std::uint32_t>(and_nodes_.size() - 1);
}

double SampleStore::arc_log_weight(int var, const SampleRecord& sample) const {
  const double log_p = partition_.log_factor(net_, var, scratch_values_.data());
  if (logspace::is_zero(log_p)) return logspace::kLogZero;
  const double log_q =
      proposal_.log_conditional(var, sample.assignment[var], scratch_values_.data());
  return log_p - log_q;
}

void SampleStore::insert(const SampleRecord& sample) {
  // Current values: evidence is preset once, sampled slots refreshed here.
  for (int v : proposal_.order())
    scratch_values_[static_cast<std::size_t>(v)] = sample.assignment[v];

  // DFS along the pseudo-tree; the sampled value at each OR node comes from
  // the (complete) sample.
  auto& stack = scratch_stack_;
  stack.assign(root_or_.rbegin(), root_or_.rend());
  while (!stack.empty()) {
    const std::uint32_t oid = stack.back();
    stack.pop_back();
    const int var = or_nodes_[oid].var;
    const int value = sample.assignment[var];
    const double log_w = arc_log_weight(var, sample);

    std::uint32_t and_id = or_nodes_[oid].arcs[static_cast<std::size_t>(value)].and_node;
    if (and_id == kNone) {
      if (merge_by_context_) {
        // AND nodes unify on the assignment of context(var), self included.
        scratch_key_.clear();
        for (int c : contexts_.context[static_cast<std::size_t>(var)])
          scratch_key_.push_back(scratch_values_[static_cast<std::size_t>(c)]);
        // Node creation never touches the merge index, so the bucket
        // reference stays valid across new_and_node.
        auto& bucket = merge_index_[static_cast<std::size_t>(var)][mix_key(scratch_key_)];
        for (const auto& [key, id] : bucket)
          if (key == scratch_key_) {
            and_id = id;
            break;
          }
        if (and_id == kNone) {
          and_id = new_and_node(var, value);
          bucket.emplace_back(scratch_key_, and_id);
        }
      } else {
        and_id = new_and_node(var, value);
      }
      Arc& arc = or_nodes_[oid].arcs[static_cast<std::size_t>(value)];
      arc.and_node = and_id;
      arc.label.log_weight = log_w;
    } else {
      const ArcLabel& label = or_nodes_[oid].arcs[static_cast<std::size_t>(value)].label;
      const bool both_zero =
          logspace::is_zero(label.log_weight) && logspace::is_zero(log_w);
      if (!both_zero && !(std::abs(label.log_weight - log_w) <= kWeightMatchTol))
        throw ConfigError(
            "sample store: arc weight mismatch at variable " + std::to_string(var) +
            " (proposal conditions outside the context, or bad partition)");
    }
    or_nodes_[oid].arcs[static_cast<std::size_t>(value)].label.count += 1;
    or_nodes_[oid].total_count += 1;

    const AndNode& a = and_nodes_[and_id];
    for (auto it = a.or_children.rbegin(); it != a.or_children.rend(); ++it)
      stack.push_back(*it);
  }
  ++samples_;
}

double SampleStore::log_mean() const {
  // Memoized recursion from the roots; every node is evaluated exactly once,
  // which in graph mode is what makes shared subtrees count once. Depth is
  // bounded by twice the pseudo-tree height.
  const std::size_t na = and_nodes_.size();
  const std::size_t no = or_nodes_.size();
  std::vector<double> and_val(na, 0.0);
  std::vector<double> or_val(no, logspace::kLogZero);
  std::vector<char> and_done(na, 0);

  // AND value = sum of child OR values (log domain product).
  auto eval_and = [&](std::uint32_t id, auto&& eval_or_ref) -> double {
    if (and_done[id]) return and_val[id];
    double acc = 0.0;
    for (std::uint32_t c : and_nodes_[id].or_children) {
      const double v = eval_or_ref(c, eval_or_ref);
      if (logspace::is_zero(v)) {
        acc = logspace::kLogZero;
        break;
      }
      acc += v;
    }
    and_done[id] = 1;
    and_val[id] = acc;
    return acc;
  };

  std::vector<char> or_done(no, 0);
  // OR value = sum(# w v) / sum(#) over arcs, in log domain. Zero-weight
  // arcs add nothing to the numerator but stay in the denominator.
  auto eval_or = [&](std::uint32_t id, auto&& self) -> double {
    if (or_done[id]) return or_val[id];
    const OrNode& node = or_nodes_[id];
    logspace::Accumulator acc;
    for (const Arc& arc : node.arcs) {
      if (arc.and_node == kNone) continue;
      if (logspace::is_zero(arc.label.log_weight)) continue;
      const double v = eval_and(arc.and_node, self);
      if (logspace::is_zero(v)) continue;
      acc.add(std::log(static_cast<double>(arc.label.count)) + arc.label.log_weight + v);
    }
    double result;
    if (node.total_count == 0) {
      result = logspace::kLogZero;  // leaf OR: unreachable from complete samples
    } else {
      result = acc.log_sum() - std::log(static_cast<double>(node.total_count));
    }
    or_done[id] = 1;
    or_val[id] = result;
    return result;
  };

  double acc = 0.0;
  for (std::uint32_t r : root_or_) {
    const double v = eval_or(r, eval_or);
    if (logspace::is_zero(v)) return logspace::kLogZero;
    acc += v;
  }
  return acc + partition_.log_constant;
}

std::vector<SampleStore::ArcView> SampleStore::arcs() const {
  std::vector<ArcView> out;
  std::vector<char> visited(and_nodes_.size(), 0);
  auto walk = [&](std::uint32_t oid, auto&& self) -> void {
    const OrNode& node = or_nodes_[oid];
    for (std::size_t value = 0; value < node.arcs.size(); ++value) {
      const Arc& arc = node.arcs[value];
      if (arc.and_node == kNone) continue;
      out.push_back({node.var, static_cast<int>(value), arc.label.log_weight,
                     arc.label.count});
      if (visited[arc.and_node]) continue;
      visited[arc.and_node] = 1;
      for (std::uint32_t c : and_nodes_[arc.and_node].or_children) self(c, self);
    }
  };
  for (std::uint32_t r : root_or_) walk(r, walk);
  return out;
}

void SampleStore::dump(std::ostream& os) const {
  // Values are recomputed so the rendering is self-contained.
  const std::size_t na = and_nodes_.size();
  std::vector<double> and_val(na, 0.0);
  std::vector<char> and_done(na, 0);
  std::vector<double> or_val(or_nodes_.size(), logspace::kLogZero);
  std::vector<char> or_done(or_nodes_.size(), 0);

  auto eval_and = [&](std::uint32_t id, auto&& eor) -> double {
    if (and_done[id]) return and_val[id];
    double acc = 0.0;
    for (std::uint32_t c : and_nodes_[id].or_children) {
      const double v = eor(c, eor);
      if (logspace::is_zero(v)) {
        acc = logspace::kLogZero;
        break;
      }
      acc += v;
    }
    and_done[id] = 1;
    and_val[id] = acc;
    return acc;
  };
  auto eval_or = [&](std::uint32_t id, auto&& self) -> double {
    if (or_done[id]) return or_val[id];
    const OrNode& node = or_nodes_[id];
    logspace::Accumulator acc;
    for (const Arc& arc : node.arcs) {
      if (arc.and_node == kNone || logspace::is_zero(arc.label.log_weight)) continue;
      const double v = eval_and(arc.and_node, self);
      if (logspace::is_zero(v)) continue;
      acc.add(std::log(static_cast<double>(arc.label.count)) + arc.label.log_weight + v);
    }
    const double r = node.total_count == 0
                         ? logspace::kLogZero
                         : acc.log_sum() - std::log(static_cast<double>(node.total_count));
    or_done[id] = 1;
    or_val[id] = r;
    return r;
  };

  char buf[96];
  std::vector<long long> printed(na, -1);  // first-visit print ids
  long long next_print_id = 0;

  auto fmt = [&](double log_x) -> std::string {
    std::snprintf(buf, sizeof buf, "%.17g", logspace::to_linear(log_x));
    return buf;
  };

  auto walk = [&](std::uint32_t oid, int indent, auto&& self) -> void {
    eval_or(oid, eval_or);
    const OrNode& node = or_nodes_[oid];
    for (std::size_t value = 0; value < node.arcs.size(); ++value) {
      const Arc& arc = node.arcs[value];
      if (arc.and_node == kNone) continue;
      for (int i = 0; i < indent; ++i) os << "  ";
      os << node.var << "=" << value << " <w=" << fmt(arc.label.log_weight)
         << ", #=" << arc.label.count << ">";
      long long& mark = printed[arc.and_node];
      if (mark >= 0) {
        os << " ref=@" << mark << "\n";
        continue;
      }
      mark = next_print_id++;
      os << " v=" << fmt(and_val[arc.and_node]) << " @" << mark << "\n";
      for (std::uint32_t c : and_nodes_[arc.and_node].or_children)
        self(c, indent + 1, self);
    }
  };

  double root = 0.0;
  for (std::uint32_t r : root_or_) root += eval_or(r, eval_or);
  os << "root v=" << fmt(root + partition_.log_constant) << " samples=" << samples_
     << "\n";
  for (std::uint32_t r : root_or_) walk(r, 0, walk);
}

}  // namespace aois
