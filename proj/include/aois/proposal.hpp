#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aois/model.hpp"
#include "aois/rng.hpp"
#include "aois/structure.hpp"

namespace aois {

// Factored proposal Q = prod_i Q_i(X_i | Y_i), one conditional table per
// non-evidence variable, sampled in pseudo-tree DFS preorder. Every Y_i must
// be a subset of context(X_i) \ {X_i}: arc weights in the sample stores are
// then pure functions of the context assignment, which is what makes merged
// accumulation sound. Rows are normalized; zero rows are legal here and
// rejected only if sampling actually reaches them.
class FactoredProposal {
 public:
  struct Factor {
    int var = -1;
    int card = 0;
    std::vector<int> cond;        // Y_i, ordered; first varies slowest
    std::vector<int> cond_cards;
    std::vector<double> probs;    // rows of length card
    std::vector<double> logs;

    std::size_t row_index(const int* values) const {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < cond.size(); ++k)
        idx = idx * static_cast<std::size_t>(cond_cards[k]) +
              static_cast<std::size_t>(values[cond[k]]);
      return idx * static_cast<std::size_t>(card);
    }
  };

  const std::vector<int>& order() const { return order_; }
  std::size_t num_vars() const { return factors_.size(); }
  const Factor& factor(int var) const { return factors_[static_cast<std::size_t>(var)]; }
  bool sampled(int var) const {
    return var >= 0 && var < static_cast<int>(factors_.size()) &&
           factors_[static_cast<std::size_t>(var)].var == var;
  }

  // log Q_i(value | conditioning values read from `values`).
  double log_conditional(int var, int value, const int* values) const {
    const Factor& f = factors_[static_cast<std::size_t>(var)];
    return f.logs[f.row_index(values) + static_cast<std::size_t>(value)];
  }

  friend FactoredProposal prior_proposal(const BayesianNetwork&, const Evidence&,
                                         const PseudoTree&, const ContextMap&);
  friend FactoredProposal uniform_proposal(const BayesianNetwork&, const Evidence&,
                                           const PseudoTree&);
  friend FactoredProposal parse_proposal(std::string_view, const BayesianNetwork&,
                                         const Evidence&, const PseudoTree&,
                                         const ContextMap&);

 private:
  std::vector<int> order_;       // DFS preorder of the pseudo-tree
  std::vector<Factor> factors_;  // indexed by variable id
};

// One drawn sample: the assignment over non-evidence variables, the total log
// proposal density and its per-variable components (aligned with the draw
// order).
struct SampleRecord {
  Assignment assignment;
  double log_q = 0.0;
  std::vector<double> log_q_per_var;
};

// Q_i = P(X_i | pa(X_i)) with evidence parents clamped; rows renormalized.
// Throws ConfigError when some network parent is not a tree ancestor of its
// child.
FactoredProposal prior_proposal(const BayesianNetwork& net, const Evidence& evidence,
                                const PseudoTree& tree, const ContextMap& contexts);

// Unconditioned uniform rows over each variable's domain.
FactoredProposal uniform_proposal(const BayesianNetwork& net, const Evidence& evidence,
                                  const PseudoTree& tree);

// Proposal file: per variable a block "var X | Y1 ... Yk" followed by the
// entry count and the table (same index convention as CPTs). Hard errors on
// unnormalized rows and on conditioning sets escaping the context.
FactoredProposal parse_proposal(std::string_view text, const BayesianNetwork& net,
                                const Evidence& evidence, const PseudoTree& tree,
                                const ContextMap& contexts);
FactoredProposal load_proposal(const std::string& path, const BayesianNetwork& net,
                               const Evidence& evidence, const PseudoTree& tree,
                               const ContextMap& contexts);
void serialize_proposal(const FactoredProposal& proposal, std::ostream& os);

// Draws a full assignment variable-by-variable in DFS preorder. Identical
// (seed, stream) pairs reproduce identical streams bit-for-bit. Throws
// ConfigError on an all-zero conditional row.
SampleRecord draw_sample(const FactoredProposal& proposal, Philox& rng);

// In-place variant reusing the record's buffers.
void draw_sample(const FactoredProposal& proposal, Philox& rng, SampleRecord& out);

// log Q(assignment): sum of the per-variable conditionals. Zero-density
// assignments return the log-zero sentinel.
double density(const FactoredProposal& proposal, const Assignment& assignment);

}  // namespace aois
