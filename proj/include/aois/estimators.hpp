#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aois/logspace.hpp"
#include "aois/model.hpp"
#include "aois/proposal.hpp"
#include "aois/structure.hpp"

namespace aois {

enum class EstimatorKind { is, aotree, aograph };

const char* estimator_name(EstimatorKind kind);

// Flat importance-sampling mean: log of (1/N) sum_i f(x^i)/Q(x^i). Zero
// weights contribute nothing to the sum but count toward N.
class IsMeanAccumulator {
 public:
  void add(double log_f, double log_q) { acc_.add(log_f - log_q); }
  void add_weight(double log_w) { acc_.add(log_w); }
  double log_mean() const { return acc_.log_mean(); }
  std::uint64_t count() const { return acc_.terms(); }

 private:
  logspace::Accumulator acc_;
};

double is_mean(const std::vector<std::pair<double, double>>& log_f_log_q);

// <w, #> label on an OR->AND arc: w is the ratio of the hosted-factor product
// to the proposal conditional (a pure function of the context assignment),
// # the number of samples that traversed the arc. Zero-weight arcs are kept;
// the OR denominator must count them.
struct ArcLabel {
  double log_weight = logspace::kLogZero;
  std::uint64_t count = 0;
};

enum class StoreKind { tree, graph };

// Sample store over the pseudo-tree: alternating OR (variable) and AND
// (value) nodes restricted to the sampled assignments. StoreKind::tree keys
// AND nodes by their root path (a trie, walked by pointer); StoreKind::graph
// merges AND nodes whose context assignments agree, so subtrees below merged
// nodes are shared and each node's value is computed once.
//
// Single-writer while inserting; evaluation is a read-only post-pass.
class SampleStore {
 public:
  SampleStore(StoreKind kind, const BayesianNetwork& net, const Evidence& evidence,
              const PseudoTree& tree, const ContextMap& contexts,
              const ScopePartition& partition, const FactoredProposal& proposal);

  void insert(const SampleRecord& sample);

  // Value of the virtual root (log domain), including the evidence constant.
  // AND nodes multiply their children; OR nodes take the frequency-weighted
  // average sum(# w v) / sum(#) over their arcs.
  double log_mean() const;

  StoreKind kind() const { return merge_by_context_ ? StoreKind::graph : StoreKind::tree; }
  std::uint64_t sample_count() const { return samples_; }
  std::size_t and_node_count() const { return and_nodes_.size(); }
  std::size_t or_node_count() const { return or_nodes_.size(); }

  // Deterministic preorder rendering ("var=value <w, #> v=..." per arc),
  // independent of insertion order. Shared subtrees print once and are
  // referenced afterwards.
  void dump(std::ostream& os) const;

  // Arc labels in deterministic preorder (shared subtrees listed once).
  struct ArcView {
    int var;
    int value;
    double log_weight;
    std::uint64_t count;
  };
  std::vector<ArcView> arcs() const;

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  struct Arc {
    std::uint32_t and_node = kNone;
    ArcLabel label;
  };
  struct OrNode {
    int var = -1;
    std::uint64_t total_count = 0;
    std::vector<Arc> arcs;  // indexed by value
  };
  struct AndNode {
    int var = -1;
    int value = -1;
    std::vector<std::uint32_t> or_children;  // aligned with tree children
  };

  std::uint32_t new_or_node(int var);
  std::uint32_t new_and_node(int var, int value);
  double arc_log_weight(int var, const SampleRecord& sample) const;

  bool merge_by_context_;
  const BayesianNetwork& net_;
  const Evidence& evidence_;
  const PseudoTree& tree_;
  const ContextMap& contexts_;
  const ScopePartition& partition_;
  const FactoredProposal& proposal_;

  std::vector<AndNode> and_nodes_;
  std::vector<OrNode> or_nodes_;
  std::vector<std::uint32_t> root_or_;  // OR nodes under the virtual root
  // graph mode: per variable, packed context-value tuple -> AND node
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::pair<std::vector<int>, std::uint32_t>>>>
      merge_index_;
  std::vector<int> scratch_values_;  // evidence preset, sample filled per insert
  std::vector<int> scratch_key_;
  std::vector<std::uint32_t> scratch_stack_;
  std::uint64_t samples_ = 0;
};

}  // namespace aois
