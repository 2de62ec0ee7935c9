#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aois/estimators.hpp"
#include "aois/model.hpp"
#include "aois/proposal.hpp"
#include "aois/structure.hpp"

namespace aois {

struct OrderSpec {
  enum class Kind { minfill, topological, file } kind = Kind::topological;
  std::string path;  // file mode
  std::uint64_t seed = 0;
};

struct ProposalSpec {
  enum class Kind { prior, uniform, file } kind = Kind::prior;
  std::string path;
};

// Everything resolved and immutable that a run needs. Safe to share across
// concurrent replicate runs.
struct EstimateSetup {
  BayesianNetwork net;
  Evidence evidence;
  PrimalGraph graph;
  PseudoTree tree;
  ContextMap contexts;
  ScopePartition partition;
  FactoredProposal proposal;
};

EstimateSetup make_setup(BayesianNetwork net, Evidence evidence, const OrderSpec& order,
                         const ProposalSpec& proposal);

struct CheckpointRow {
  std::uint64_t n = 0;
  double log_estimate = logspace::kLogZero;
  double wall_ms = 0.0;  // filled only when timing is requested
};

struct EstimatorTrace {
  std::vector<CheckpointRow> rows;
  std::size_t and_nodes = 0;  // final store sizes; zero for the flat mean
  std::size_t or_nodes = 0;
};

struct RunOutput {
  std::map<EstimatorKind, EstimatorTrace> traces;
  std::uint64_t rng_draws = 0;
};

// Runs the selected estimators over one shared sample stream: exactly N
// samples are drawn regardless of how many estimators consume them.
// Checkpoints must be ascending and bounded by num_samples; a running
// estimate is recorded at each. Store evaluation at a checkpoint is a
// read-only pass, so intermediate checkpoints are exact.
RunOutput run_estimators(const EstimateSetup& setup,
                         const std::vector<EstimatorKind>& estimators,
                         std::uint64_t num_samples, std::uint64_t seed,
                         std::uint64_t stream, std::vector<std::uint64_t> checkpoints,
                         bool measure_time = false);

// Final-checkpoint estimate of one estimator (linear domain), convenience for
// replicate studies.
double run_single_estimate(const EstimateSetup& setup, EstimatorKind kind,
                           std::uint64_t num_samples, std::uint64_t seed,
                           std::uint64_t stream);

}  // namespace aois
