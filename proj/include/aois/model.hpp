#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aois/logspace.hpp"

namespace aois {

struct Variable {
  int id = -1;
  int cardinality = 0;
};

// Conditional probability table P(child | parents). Rows are indexed by the
// parent configuration (first parent varies slowest), entries within a row by
// the child value. Row sums are validated to 1 within 1e-9.
struct Cpt {
  int child = -1;
  std::vector<int> parents;
  int child_card = 0;
  std::vector<int> parent_cards;
  std::vector<double> table;      // linear probabilities
  std::vector<double> log_table;  // filled on validation

  std::size_t size() const { return table.size(); }

  // Flat index for the entry selected by a dense value vector covering every
  // variable in scope.
  std::size_t entry_index(const int* values) const {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < parents.size(); ++k)
      idx = idx * static_cast<std::size_t>(parent_cards[k]) +
            static_cast<std::size_t>(values[parents[k]]);
    return idx * static_cast<std::size_t>(child_card) +
           static_cast<std::size_t>(values[child]);
  }

  double log_entry(const int* values) const { return log_table[entry_index(values)]; }
};

class Evidence;

class BayesianNetwork {
 public:
  BayesianNetwork() = default;  // empty; fill via make/parse

  // Validates cardinalities, one CPT per variable, table shapes, row
  // normalization (rows off by more than 1e-12 but at most 1e-6 are
  // renormalized, reported through `warnings`; larger deviations throw
  // ParseError) and acyclicity of the parent relation.
  static BayesianNetwork make(std::vector<int> cardinalities, std::vector<Cpt> cpts,
                              std::vector<std::string>* warnings = nullptr);

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int cardinality(int v) const { return vars_[static_cast<std::size_t>(v)].cardinality; }
  int max_cardinality() const;
  const std::vector<Variable>& variables() const { return vars_; }

  // The CPT whose child is v.
  const Cpt& cpt(int v) const { return cpts_[static_cast<std::size_t>(v)]; }
  const std::vector<Cpt>& cpts() const { return cpts_; }

 private:
  std::vector<Variable> vars_;
  std::vector<Cpt> cpts_;  // indexed by child id
};

// Observed variables with their values. Immutable once constructed.
class Evidence {
 public:
  Evidence() = default;
  // Validates ranges and rejects duplicate variables.
  Evidence(std::vector<std::pair<int, int>> items, const BayesianNetwork& net);

  bool observed(int var) const {
    return var >= 0 && var < static_cast<int>(value_of_.size()) && value_of_[var] >= 0;
  }
  // -1 when unobserved.
  int value(int var) const {
    return var < static_cast<int>(value_of_.size()) ? value_of_[var] : -1;
  }
  const std::vector<std::pair<int, int>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<std::pair<int, int>> items_;  // sorted by variable id
  std::vector<int> value_of_;
};

// Dense partial assignment; -1 marks unassigned slots.
struct Assignment {
  static constexpr int kUnassigned = -1;

  Assignment() = default;
  explicit Assignment(std::size_t n) : values(n, kUnassigned) {}

  bool assigned(int v) const { return values[static_cast<std::size_t>(v)] >= 0; }
  int operator[](int v) const { return values[static_cast<std::size_t>(v)]; }
  void set(int v, int value) { values[static_cast<std::size_t>(v)] = value; }

  bool operator==(const Assignment&) const = default;

  std::vector<int> values;
};

// --- UAI Bayes-format I/O ---------------------------------------------------

BayesianNetwork parse_network(std::string_view text,
                              std::vector<std::string>* warnings = nullptr);
BayesianNetwork load_network(const std::string& path,
                             std::vector<std::string>* warnings = nullptr);
void serialize_network(const BayesianNetwork& net, std::ostream& os);

Evidence parse_evidence(std::string_view text, const BayesianNetwork& net);
Evidence load_evidence(const std::string& path, const BayesianNetwork& net);

// --- Weights -----------------------------------------------------------------

// log of the product of all CPT entries under `full`, with observed variables
// clamped to their evidence values. Any zero factor yields the log-zero
// sentinel. Throws std::invalid_argument if a non-evidence variable is
// unassigned.
double joint_weight(const BayesianNetwork& net, const Assignment& full,
                    const Evidence& evidence);

struct PseudoTree;  // structure.hpp

// Assignment of every CPT to the deepest pseudo-tree variable in its
// non-evidence scope. CPTs whose scope is fully observed have no host
// variable; their product is folded into log_constant.
struct ScopePartition {
  std::vector<std::vector<int>> cpts_at;  // var id -> child ids of hosted CPTs
  double log_constant = 0.0;

  // log of the product of the CPTs hosted at `var`, evaluated on a dense
  // value vector covering scope variables.
  double log_factor(const BayesianNetwork& net, int var, const int* values) const {
    double acc = 0.0;
    for (int c : cpts_at[static_cast<std::size_t>(var)]) {
      const double le = net.cpt(c).log_entry(values);
      if (logspace::is_zero(le)) return logspace::kLogZero;
      acc += le;
    }
    return acc;
  }
};

ScopePartition exactly_one_scope_partition(const BayesianNetwork& net,
                                           const Evidence& evidence,
                                           const PseudoTree& tree);

}  // namespace aois
