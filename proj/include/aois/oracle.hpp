#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "aois/estimators.hpp"
#include "aois/model.hpp"
#include "aois/proposal.hpp"
#include "aois/structure.hpp"

// Exact reference computations for desk-scale instances. Everything here is
// independent of the estimator implementations it is used to check, except
// estimator_distribution, which deliberately runs the real estimator code on
// every possible sample sequence.
namespace aois::oracle {

// log P(e) by summation over all complete assignments. Throws ResourceError
// when the assignment space exceeds roughly 2^24.
double exact_pe_enumeration(const BayesianNetwork& net, const Evidence& evidence);

// log P(e) by depth-first traversal of the full context-minimal space with
// per-variable memo tables keyed by the context assignment. Throws
// ResourceError when a memo table would exceed roughly 2^24 entries.
double exact_pe_ao_search(const BayesianNetwork& net, const Evidence& evidence,
                          const PseudoTree& tree, const ContextMap& contexts);

// One assignment in the proposal's support with everything the estimators
// need to replay it.
struct SupportPoint {
  SampleRecord record;
  double prob = 0.0;   // Q(x), linear
  double log_f = 0.0;  // joint weight
};

std::vector<SupportPoint> sample_support(const BayesianNetwork& net,
                                         const Evidence& evidence,
                                         const FactoredProposal& proposal);

// Exact distribution of an estimator over every ordered N-sample sequence,
// each weighted by its proposal probability. The estimator value for a
// sequence is produced by the production estimator code.
struct EstimatorDistribution {
  std::vector<std::pair<double, double>> outcomes;  // (value, probability)
  double mean = 0.0;
  double variance = 0.0;

  double probability_total() const;
  double central_moment(int k) const;
};

EstimatorDistribution estimator_distribution(const BayesianNetwork& net,
                                             const Evidence& evidence,
                                             const FactoredProposal& proposal,
                                             const PseudoTree& tree,
                                             const ContextMap& contexts,
                                             const ScopePartition& partition,
                                             int num_samples, EstimatorKind kind);

// Same enumeration restricted to sequences whose value counts for
// `condition_var` equal `counts`; outcome probabilities are renormalized
// within the stratum.
EstimatorDistribution conditional_estimator_distribution(
    const BayesianNetwork& net, const Evidence& evidence,
    const FactoredProposal& proposal, const PseudoTree& tree,
    const ContextMap& contexts, const ScopePartition& partition, int num_samples,
    EstimatorKind kind, int condition_var, const std::vector<int>& counts);

// Two-child fork: root Z with independent branches X and Y. q_* are the
// proposal conditionals, f_* the per-branch factor products (evidence
// already folded in); f_x[z][x] is the product of the factors hosted at X
// under (x, z), and likewise for Y.
struct ForkModelSpec {
  std::vector<double> q_z;
  std::vector<std::vector<double>> q_x;  // [z][x]
  std::vector<std::vector<double>> q_y;
  std::vector<double> f_z;
  std::vector<std::vector<double>> f_x;
  std::vector<std::vector<double>> f_y;

  // Conditional mean / variance of the branch weight ratio f/q given Z = z,
  // by direct enumeration.
  double mean_x(int z) const;
  double var_x(int z) const;
  double mean_y(int z) const;
  double var_y(int z) const;
  double z_ratio(int z) const;  // f_z / q_z
  double overall_mean() const;  // exact P(e)
};

// Reads the fork tables off a concrete network/partition/proposal triple;
// the pseudo-tree must be a root with exactly two leaf children.
ForkModelSpec fork_spec_from(const BayesianNetwork& net, const Evidence& evidence,
                             const PseudoTree& tree, const ScopePartition& partition,
                             const FactoredProposal& proposal);

struct ForkVariances {
  double var_is = 0.0;  // unconditional variance of the flat mean at N samples
  double var_ao = 0.0;  // variance of the fork mean given the Z counts
};

// Closed forms over exactly enumerated conditional moments. Binary Z only;
// counts must sum to N. A zero count for a Z value with positive proposal
// mass throws ConfigError (the conditional moments are undefined there).
ForkVariances fork_analytic_variances(const ForkModelSpec& spec, int num_samples,
                                      std::pair<int, int> counts);

// Replicate statistics of an estimator configuration. `run` maps a stream id
// to a (linear-domain) estimate; replicates may execute on several threads,
// results are reduced in stream order.
struct ReplicateStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double std_error = 0.0;
};

ReplicateStats empirical_variance(const std::function<double(std::uint64_t)>& run,
                                  int replicates, int threads = 1);

}  // namespace aois::oracle
