#include "aois/runner.hpp"

#include <algorithm>
#include <chrono>

#include "aois/error.hpp"

namespace aois {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

EstimateSetup make_setup(BayesianNetwork net, Evidence evidence, const OrderSpec& order,
                         const ProposalSpec& proposal) {
  EstimateSetup s;
  s.net = std::move(net);
  s.evidence = std::move(evidence);
  s.graph = moral_graph(s.net, s.evidence);

  switch (order.kind) {
    case OrderSpec::Kind::minfill:
      s.tree = pseudo_tree_from_order(s.graph, min_fill_order(s.graph, order.seed));
      break;
    case OrderSpec::Kind::topological:
      s.tree = pseudo_tree_from_order(s.graph,
                                      topological_elimination_order(s.net, s.evidence));
      break;
    case OrderSpec::Kind::file:
      s.tree = load_pseudo_tree(order.path, s.graph);
      break;
  }
  s.contexts = compute_contexts(s.tree, s.graph);
  s.partition = exactly_one_scope_partition(s.net, s.evidence, s.tree);

  switch (proposal.kind) {
    case ProposalSpec::Kind::prior:
      s.proposal = prior_proposal(s.net, s.evidence, s.tree, s.contexts);
      break;
    case ProposalSpec::Kind::uniform:
      s.proposal = uniform_proposal(s.net, s.evidence, s.tree);
      break;
    case ProposalSpec::Kind::file:
      s.proposal = load_proposal(proposal.path, s.net, s.evidence, s.tree, s.contexts);
      break;
  }
  return s;
}

RunOutput run_estimators(const EstimateSetup& setup,
                         const std::vector<EstimatorKind>& estimators,
                         std::uint64_t num_samples, std::uint64_t seed,
                         std::uint64_t stream, std::vector<std::uint64_t> checkpoints,
                         bool measure_time) {
  if (num_samples < 1) throw ConfigError("run: need at least one sample");
  if (estimators.empty()) throw ConfigError("run: no estimators selected");
  if (checkpoints.empty()) checkpoints.push_back(num_samples);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > num_samples ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw ConfigError("run: checkpoints must be ascending and within 1..N");
  }

  const bool want_is =
      std::find(estimators.begin(), estimators.end(), EstimatorKind::is) != estimators.end();
  const bool want_tree = std::find(estimators.begin(), estimators.end(),
                                   EstimatorKind::aotree) != estimators.end();
  const bool want_graph = std::find(estimators.begin(), estimators.end(),
                                    EstimatorKind::aograph) != estimators.end();

  IsMeanAccumulator is_acc;
  std::optional<SampleStore> tree_store;
  std::optional<SampleStore> graph_store;
  if (want_tree)
    tree_store.emplace(StoreKind::tree, setup.net, setup.evidence, setup.tree,
                       setup.contexts, setup.partition, setup.proposal);
  if (want_graph)
    graph_store.emplace(StoreKind::graph, setup.net, setup.evidence, setup.tree,
                        setup.contexts, setup.partition, setup.proposal);

  RunOutput out;
  for (EstimatorKind k : estimators) out.traces[k];  // fixed row order

  double is_ms = 0.0, tree_ms = 0.0, graph_ms = 0.0;
  Philox rng(seed, stream);
  SampleRecord rec;
  std::size_t next_cp = 0;

  for (std::uint64_t i = 1; i <= num_samples; ++i) {
    draw_sample(setup.proposal, rng, rec);

    // One shared stream: every selected estimator consumes this sample.
    if (want_is) {
      const auto t0 = measure_time ? Clock::now() : Clock::time_point{};
      is_acc.add(joint_weight(setup.net, rec.assignment, setup.evidence), rec.log_q);
      if (measure_time) is_ms += ms_since(t0);
    }
    if (want_tree) {
      const auto t0 = measure_time ? Clock::now() : Clock::time_point{};
      tree_store->insert(rec);
      if (measure_time) tree_ms += ms_since(t0);
    }
    if (want_graph) {
      const auto t0 = measure_time ? Clock::now() : Clock::time_point{};
      graph_store->insert(rec);
      if (measure_time) graph_ms += ms_since(t0);
    }

    if (next_cp < checkpoints.size() && i == checkpoints[next_cp]) {
      ++next_cp;
      for (EstimatorKind k : estimators) {
        CheckpointRow row;
        row.n = i;
        const auto t0 = measure_time ? Clock::now() : Clock::time_point{};
        switch (k) {
          case EstimatorKind::is: row.log_estimate = is_acc.log_mean(); break;
          case EstimatorKind::aotree: row.log_estimate = tree_store->log_mean(); break;
          case EstimatorKind::aograph: row.log_estimate = graph_store->log_mean(); break;
        }
        if (measure_time) {
          const double ms = ms_since(t0);
          switch (k) {
            case EstimatorKind::is: is_ms += ms; row.wall_ms = is_ms; break;
            case EstimatorKind::aotree: tree_ms += ms; row.wall_ms = tree_ms; break;
            case EstimatorKind::aograph: graph_ms += ms; row.wall_ms = graph_ms; break;
          }
        }
        out.traces[k].rows.push_back(row);
      }
    }
  }

  if (want_tree) {
    out.traces[EstimatorKind::aotree].and_nodes = tree_store->and_node_count();
    out.traces[EstimatorKind::aotree].or_nodes = tree_store->or_node_count();
  }
  if (want_graph) {
    out.traces[EstimatorKind::aograph].and_nodes = graph_store->and_node_count();
    out.traces[EstimatorKind::aograph].or_nodes = graph_store->or_node_count();
  }
  out.rng_draws = rng.draws();
  return out;
}

double run_single_estimate(const EstimateSetup& setup, EstimatorKind kind,
                           std::uint64_t num_samples, std::uint64_t seed,
                           std::uint64_t stream) {
  RunOutput out = run_estimators(setup, {kind}, num_samples, seed, stream, {num_samples});
  return logspace::to_linear(out.traces[kind].rows.back().log_estimate);
}

}  // namespace aois
