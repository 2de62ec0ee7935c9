#include "aois/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "aois/error.hpp"

namespace aois::oracle {

namespace {

constexpr double kMaxLogStates = 24.5;         // enumeration bound, ~2^24 assignments
constexpr std::size_t kMaxMemoEntries = 1u << 24;  // per-variable memo bound
constexpr std::size_t kMaxSequences = 1u << 22;    // ordered sample sequences

std::vector<int> free_variables(const BayesianNetwork& net, const Evidence& evidence) {
  std::vector<int> vars;
  for (int v = 0; v < net.num_vars(); ++v)
    if (!evidence.observed(v)) vars.push_back(v);
  return vars;
}

}  // namespace

double exact_pe_enumeration(const BayesianNetwork& net, const Evidence& evidence) {
  const std::vector<int> vars = free_variables(net, evidence);
  double log_states = 0.0;
  for (int v : vars) log_states += std::log2(static_cast<double>(net.cardinality(v)));
  if (log_states > kMaxLogStates)
    throw ResourceError("exact_pe_enumeration: " + std::to_string(log_states) +
                        " bits of assignment space exceeds the enumeration bound");

  Assignment full(static_cast<std::size_t>(net.num_vars()));
  logspace::Accumulator acc;
  // Odometer over the free variables.
  for (int v : vars) full.set(v, 0);
  while (true) {
    acc.add(joint_weight(net, full, evidence));
    std::size_t k = vars.size();
    while (k-- > 0) {
      const int v = vars[k];
      if (full[v] + 1 < net.cardinality(v)) {
        full.set(v, full[v] + 1);
        break;
      }
      full.set(v, 0);
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return acc.log_sum();
}

double exact_pe_ao_search(const BayesianNetwork& net, const Evidence& evidence,
                          const PseudoTree& tree, const ContextMap& contexts) {
  const ScopePartition partition = exactly_one_scope_partition(net, evidence, tree);

  for (int v : tree.preorder) {
    double entries = 1.0;
    for (std::size_t i = 1; i < contexts.context[static_cast<std::size_t>(v)].size(); ++i)
      entries *= static_cast<double>(
          net.cardinality(contexts.context[static_cast<std::size_t>(v)][i]));
    if (entries > static_cast<double>(kMaxMemoEntries))
      throw ResourceError("exact_pe_ao_search: context table for variable " +
                          std::to_string(v) + " exceeds the memory bound");
  }

  std::vector<int> values(static_cast<std::size_t>(net.num_vars()), -1);
  for (const auto& [var, value] : evidence.items())
    values[static_cast<std::size_t>(var)] = value;

  // One memo per variable, keyed by the packed assignment of its context
  // minus itself.
  std::vector<std::unordered_map<std::uint64_t, double>> memo(
      static_cast<std::size_t>(net.num_vars()));

  auto or_key = [&](int v) {
    const auto& ctx = contexts.context[static_cast<std::size_t>(v)];
    std::uint64_t key = 0;
    for (std::size_t i = 1; i < ctx.size(); ++i)
      key = key * static_cast<std::uint64_t>(net.cardinality(ctx[i])) +
            static_cast<std::uint64_t>(values[static_cast<std::size_t>(ctx[i])]);
    return key;
  };

  // log sum over the variable's domain of the hosted-factor product times the
  // children's values.
  auto value_of = [&](int v, auto&& self) -> double {
    auto& table = memo[static_cast<std::size_t>(v)];
    const std::uint64_t key = or_key(v);
    if (auto it = table.find(key); it != table.end()) return it->second;

    logspace::Accumulator acc;
    for (int x = 0; x < net.cardinality(v); ++x) {
      values[static_cast<std::size_t>(v)] = x;
      double term = partition.log_factor(net, v, values.data());
      if (!logspace::is_zero(term)) {
        for (int c : tree.children[static_cast<std::size_t>(v)]) {
          const double cv = self(c, self);
          if (logspace::is_zero(cv)) {
            term = logspace::kLogZero;
            break;
          }
          term += cv;
        }
      }
      acc.add(term);
    }
    values[static_cast<std::size_t>(v)] = -1;
    const double result = acc.log_sum();
    table.emplace(key, result);
    return result;
  };

  double total = partition.log_constant;
  for (int r : tree.roots) {
    const double v = value_of(r, value_of);
    if (logspace::is_zero(v)) return logspace::kLogZero;
    total += v;
  }
  return total;
}

std::vector<SupportPoint> sample_support(const BayesianNetwork& net,
                                         const Evidence& evidence,
                                         const FactoredProposal& proposal) {
  const std::vector<int> vars(proposal.order());
  double log_states = 0.0;
  for (int v : vars) log_states += std::log2(static_cast<double>(net.cardinality(v)));
  if (log_states > kMaxLogStates)
    throw ResourceError("sample_support: assignment space exceeds the enumeration bound");

  std::vector<SupportPoint> support;
  Assignment a(static_cast<std::size_t>(net.num_vars()));
  for (int v : vars) a.set(v, 0);
  while (true) {
    const double log_q = density(proposal, a);
    if (!logspace::is_zero(log_q)) {
      SupportPoint p;
      p.record.assignment = a;
      p.record.log_q = log_q;
      p.record.log_q_per_var.reserve(vars.size());
      for (int v : proposal.order())
        p.record.log_q_per_var.push_back(
            proposal.log_conditional(v, a[v], a.values.data()));
      p.prob = logspace::to_linear(log_q);
      p.log_f = joint_weight(net, a, evidence);
      support.push_back(std::move(p));
    }
    std::size_t k = vars.size();
    while (k-- > 0) {
      const int v = vars[k];
      if (a[v] + 1 < net.cardinality(v)) {
        a.set(v, a[v] + 1);
        break;
      }
      a.set(v, 0);
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return support;
}

double EstimatorDistribution::probability_total() const {
  double t = 0.0;
  for (const auto& [value, prob] : outcomes) t += prob;
  return t;
}

double EstimatorDistribution::central_moment(int k) const {
  double m = 0.0;
  for (const auto& [value, prob] : outcomes) m += prob * std::pow(value - mean, k);
  return m;
}

namespace {

// Shared enumeration for the full and counts-conditioned distributions.
EstimatorDistribution enumerate_sequences(
    const BayesianNetwork& net, const Evidence& evidence,
    const FactoredProposal& proposal, const PseudoTree& tree,
    const ContextMap& contexts, const ScopePartition& partition, int num_samples,
    EstimatorKind kind, const std::function<bool(const std::vector<int>&)>& keep) {
  if (num_samples < 1) throw ConfigError("estimator_distribution: need N >= 1");
  const std::vector<SupportPoint> support = sample_support(net, evidence, proposal);
  const std::size_t s = support.size();
  double seq_count = 1.0;
  for (int i = 0; i < num_samples; ++i) seq_count *= static_cast<double>(s);
  if (seq_count > static_cast<double>(kMaxSequences))
    throw ResourceError("estimator_distribution: " + std::to_string(seq_count) +
                        " sample sequences exceed the enumeration bound");

  EstimatorDistribution dist;
  dist.outcomes.reserve(static_cast<std::size_t>(seq_count));

  std::vector<int> idx(static_cast<std::size_t>(num_samples), 0);
  while (true) {
    if (!keep || keep(idx)) {
      double prob = 1.0;
      for (int i : idx) prob *= support[static_cast<std::size_t>(i)].prob;

      double value = 0.0;
      if (kind == EstimatorKind::is) {
        IsMeanAccumulator acc;
        for (int i : idx)
          acc.add(support[static_cast<std::size_t>(i)].log_f,
                  support[static_cast<std::size_t>(i)].record.log_q);
        value = logspace::to_linear(acc.log_mean());
      } else {
        SampleStore store(kind == EstimatorKind::aotree ? StoreKind::tree : StoreKind::graph,
                          net, evidence, tree, contexts, partition, proposal);
        for (int i : idx) store.insert(support[static_cast<std::size_t>(i)].record);
        value = logspace::to_linear(store.log_mean());
      }
      dist.outcomes.emplace_back(value, prob);
    }

    std::size_t k = idx.size();
    while (k-- > 0) {
      if (++idx[k] < static_cast<int>(s)) break;
      idx[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }

  const double total = dist.probability_total();
  if (total <= 0.0)
    throw ConfigError("estimator_distribution: conditioning event has zero probability");
  double mean = 0.0;
  for (auto& [value, prob] : dist.outcomes) {
    prob /= total;
    mean += prob * value;
  }
  // For the unconditioned enumeration `total` is 1 up to rounding, so the
  // normalization is a no-op within tolerance.
  dist.mean = mean;
  double var = 0.0;
  for (const auto& [value, prob] : dist.outcomes)
    var += prob * (value - mean) * (value - mean);
  dist.variance = var;
  return dist;
}

}  // namespace

EstimatorDistribution estimator_distribution(const BayesianNetwork& net,
                                             const Evidence& evidence,
                                             const FactoredProposal& proposal,
                                             const PseudoTree& tree,
                                             const ContextMap& contexts,
                                             const ScopePartition& partition,
                                             int num_samples, EstimatorKind kind) {
  return enumerate_sequences(net, evidence, proposal, tree, contexts, partition,
                             num_samples, kind, nullptr);
}

EstimatorDistribution conditional_estimator_distribution(
    const BayesianNetwork& net, const Evidence& evidence,
    const FactoredProposal& proposal, const PseudoTree& tree,
    const ContextMap& contexts, const ScopePartition& partition, int num_samples,
    EstimatorKind kind, int condition_var, const std::vector<int>& counts) {
  std::vector<int> support_values;
  for (const SupportPoint& p : sample_support(net, evidence, proposal))
    support_values.push_back(p.record.assignment[condition_var]);

  auto keep = [support_values, counts](const std::vector<int>& idx) {
    std::vector<int> seen(counts.size(), 0);
    for (int i : idx) {
      const int v = support_values[static_cast<std::size_t>(i)];
      if (v < 0 || static_cast<std::size_t>(v) >= seen.size()) return false;
      ++seen[static_cast<std::size_t>(v)];
    }
    return std::equal(seen.begin(), seen.end(), counts.begin());
  };
  return enumerate_sequences(net, evidence, proposal, tree, contexts, partition,
                             num_samples, kind, keep);
}

// --- Fork model ---------------------------------------------------------------

double ForkModelSpec::mean_x(int z) const {
  double m = 0.0;
  for (std::size_t x = 0; x < q_x[static_cast<std::size_t>(z)].size(); ++x)
    if (q_x[static_cast<std::size_t>(z)][x] > 0.0) m += f_x[static_cast<std::size_t>(z)][x];
  return m;
}

double ForkModelSpec::var_x(int z) const {
  const double m = mean_x(z);
  double e2 = 0.0;
  for (std::size_t x = 0; x < q_x[static_cast<std::size_t>(z)].size(); ++x) {
    const double q = q_x[static_cast<std::size_t>(z)][x];
    if (q > 0.0)
      e2 += f_x[static_cast<std::size_t>(z)][x] * f_x[static_cast<std::size_t>(z)][x] / q;
  }
  return e2 - m * m;
}

double ForkModelSpec::mean_y(int z) const {
  double m = 0.0;
  for (std::size_t y = 0; y < q_y[static_cast<std::size_t>(z)].size(); ++y)
    if (q_y[static_cast<std::size_t>(z)][y] > 0.0) m += f_y[static_cast<std::size_t>(z)][y];
  return m;
}

double ForkModelSpec::var_y(int z) const {
  const double m = mean_y(z);
  double e2 = 0.0;
  for (std::size_t y = 0; y < q_y[static_cast<std::size_t>(z)].size(); ++y) {
    const double q = q_y[static_cast<std::size_t>(z)][y];
    if (q > 0.0)
      e2 += f_y[static_cast<std::size_t>(z)][y] * f_y[static_cast<std::size_t>(z)][y] / q;
  }
  return e2 - m * m;
}

double ForkModelSpec::z_ratio(int z) const {
  return q_z[static_cast<std::size_t>(z)] > 0.0
             ? f_z[static_cast<std::size_t>(z)] / q_z[static_cast<std::size_t>(z)]
             : 0.0;
}

double ForkModelSpec::overall_mean() const {
  double m = 0.0;
  for (std::size_t z = 0; z < q_z.size(); ++z)
    if (q_z[z] > 0.0) m += f_z[z] * mean_x(static_cast<int>(z)) * mean_y(static_cast<int>(z));
  return m;
}

ForkModelSpec fork_spec_from(const BayesianNetwork& net, const Evidence& evidence,
                             const PseudoTree& tree, const ScopePartition& partition,
                             const FactoredProposal& proposal) {
  if (tree.roots.size() != 1)
    throw ConfigError("fork_spec_from: expected a single pseudo-tree root");
  const int z = tree.roots.front();
  const auto& kids = tree.children[static_cast<std::size_t>(z)];
  if (kids.size() != 2 || !tree.children[static_cast<std::size_t>(kids[0])].empty() ||
      !tree.children[static_cast<std::size_t>(kids[1])].empty())
    throw ConfigError("fork_spec_from: pseudo-tree is not a two-leaf fork");
  const int x = kids[0];
  const int y = kids[1];

  std::vector<int> values(static_cast<std::size_t>(net.num_vars()), -1);
  for (const auto& [var, value] : evidence.items())
    values[static_cast<std::size_t>(var)] = value;

  ForkModelSpec spec;
  const int cz = net.cardinality(z);
  const int cx = net.cardinality(x);
  const int cy = net.cardinality(y);
  spec.q_z.resize(static_cast<std::size_t>(cz));
  spec.f_z.resize(static_cast<std::size_t>(cz));
  spec.q_x.assign(static_cast<std::size_t>(cz), std::vector<double>(static_cast<std::size_t>(cx)));
  spec.f_x.assign(static_cast<std::size_t>(cz), std::vector<double>(static_cast<std::size_t>(cx)));
  spec.q_y.assign(static_cast<std::size_t>(cz), std::vector<double>(static_cast<std::size_t>(cy)));
  spec.f_y.assign(static_cast<std::size_t>(cz), std::vector<double>(static_cast<std::size_t>(cy)));

  for (int zv = 0; zv < cz; ++zv) {
    values[static_cast<std::size_t>(z)] = zv;
    spec.q_z[static_cast<std::size_t>(zv)] =
        logspace::to_linear(proposal.log_conditional(z, zv, values.data()));
    spec.f_z[static_cast<std::size_t>(zv)] =
        logspace::to_linear(partition.log_factor(net, z, values.data()));
    for (int xv = 0; xv < cx; ++xv) {
      values[static_cast<std::size_t>(x)] = xv;
      spec.q_x[static_cast<std::size_t>(zv)][static_cast<std::size_t>(xv)] =
          logspace::to_linear(proposal.log_conditional(x, xv, values.data()));
      spec.f_x[static_cast<std::size_t>(zv)][static_cast<std::size_t>(xv)] =
          logspace::to_linear(partition.log_factor(net, x, values.data()));
    }
    values[static_cast<std::size_t>(x)] = -1;
    for (int yv = 0; yv < cy; ++yv) {
      values[static_cast<std::size_t>(y)] = yv;
      spec.q_y[static_cast<std::size_t>(zv)][static_cast<std::size_t>(yv)] =
          logspace::to_linear(proposal.log_conditional(y, yv, values.data()));
      spec.f_y[static_cast<std::size_t>(zv)][static_cast<std::size_t>(yv)] =
          logspace::to_linear(partition.log_factor(net, y, values.data()));
    }
    values[static_cast<std::size_t>(y)] = -1;
  }
  return spec;
}

ForkVariances fork_analytic_variances(const ForkModelSpec& spec, int num_samples,
                                      std::pair<int, int> counts) {
  if (spec.q_z.size() != 2)
    throw ConfigError("fork_analytic_variances: the closed forms cover binary Z only");
  if (counts.first + counts.second != num_samples)
    throw ConfigError("fork_analytic_variances: counts must sum to N");
  const int nj[2] = {counts.first, counts.second};
  for (int z = 0; z < 2; ++z) {
    if (nj[z] == 0 && spec.q_z[static_cast<std::size_t>(z)] > 0.0)
      throw ConfigError(
          "fork_analytic_variances: zero count for a Z value with positive proposal "
          "mass; the conditional moments are undefined");
    if (nj[z] < 0) throw ConfigError("fork_analytic_variances: negative count");
  }

  const double n = static_cast<double>(num_samples);
  const double mu = spec.overall_mean();

  // Unconditional variance of the flat mean: Var(w)/N with w = z x y and the
  // branch ratios independent given Z.
  double e2 = 0.0;
  for (int z = 0; z < 2; ++z) {
    const double qz = spec.q_z[static_cast<std::size_t>(z)];
    if (qz <= 0.0) continue;
    const double zr = spec.z_ratio(z);
    const double mx = spec.mean_x(z), vx = spec.var_x(z);
    const double my = spec.mean_y(z), vy = spec.var_y(z);
    e2 += qz * zr * zr * (mx * mx + vx) * (my * my + vy);
  }

  ForkVariances out;
  out.var_is = (e2 - mu * mu) / n;

  // Conditional variance of the fork mean given the Z counts: stratum j
  // contributes (N_j/N)^2 z_j^2 Var(Xbar_j Ybar_j).
  double var_ao = 0.0;
  for (int z = 0; z < 2; ++z) {
    if (nj[z] == 0) continue;
    const double zr = spec.z_ratio(z);
    const double mx = spec.mean_x(z), vx = spec.var_x(z);
    const double my = spec.mean_y(z), vy = spec.var_y(z);
    const double count = static_cast<double>(nj[z]);
    var_ao += zr * zr * (count * (mx * mx * vy + my * my * vx) + vx * vy);
  }
  out.var_ao = var_ao / (n * n);
  return out;
}

ReplicateStats empirical_variance(const std::function<double(std::uint64_t)>& run,
                                  int replicates, int threads) {
  if (replicates < 2) throw ConfigError("empirical_variance: need at least 2 replicates");
  std::vector<double> estimates(static_cast<std::size_t>(replicates), 0.0);

  threads = std::max(1, std::min(threads, replicates));
  if (threads == 1) {
    for (int r = 0; r < replicates; ++r)
      estimates[static_cast<std::size_t>(r)] = run(static_cast<std::uint64_t>(r));
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < replicates; r = next.fetch_add(1))
          estimates[static_cast<std::size_t>(r)] = run(static_cast<std::uint64_t>(r));
      });
    for (auto& th : pool) th.join();
  }

  ReplicateStats stats;
  for (double e : estimates) stats.mean += e;
  stats.mean /= static_cast<double>(replicates);
  for (double e : estimates) stats.variance += (e - stats.mean) * (e - stats.mean);
  stats.variance /= static_cast<double>(replicates - 1);
  stats.std_error = std::sqrt(stats.variance / static_cast<double>(replicates));
  return stats;
}

}  // namespace aois::oracle
