#include "aois/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "aois/error.hpp"
#include "aois/structure.hpp"
#include "text_io.hpp"

namespace aois {

namespace {

std::string var_str(int v) { return "variable " + std::to_string(v); }

// Row sums within this of 1 are left untouched so that serialization round
// trips bit-exactly; deviations up to kRenormLimit are renormalized.
constexpr double kRenormSkip = 1e-12;
constexpr double kRenormLimit = 1e-6;

}  // namespace

namespace detail {

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(std::string(what) + ": cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace detail

int BayesianNetwork::max_cardinality() const {
  int m = 0;
  for (const Variable& v : vars_) m = std::max(m, v.cardinality);
  return m;
}

BayesianNetwork BayesianNetwork::make(std::vector<int> cardinalities,
                                      std::vector<Cpt> cpts,
                                      std::vector<std::string>* warnings) {
  const int n = static_cast<int>(cardinalities.size());
  BayesianNetwork net;
  net.vars_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (cardinalities[static_cast<std::size_t>(i)] < 1)
      throw ParseError(var_str(i) + ": cardinality must be positive");
    net.vars_[static_cast<std::size_t>(i)] = Variable{i, cardinalities[static_cast<std::size_t>(i)]};
  }

  if (static_cast<int>(cpts.size()) != n)
    throw ParseError("expected exactly one CPT per variable (" + std::to_string(n) +
                     "), got " + std::to_string(cpts.size()));

  net.cpts_.resize(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Cpt& cpt : cpts) {
    if (cpt.child < 0 || cpt.child >= n)
      throw ParseError("CPT child id " + std::to_string(cpt.child) + " out of range");
    if (seen[static_cast<std::size_t>(cpt.child)])
      throw ParseError(var_str(cpt.child) + " is the child of two CPTs");
    seen[static_cast<std::size_t>(cpt.child)] = 1;

    cpt.child_card = cardinalities[static_cast<std::size_t>(cpt.child)];
    cpt.parent_cards.clear();
    std::size_t rows = 1;
    for (int p : cpt.parents) {
      if (p < 0 || p >= n)
        throw ParseError("CPT for " + var_str(cpt.child) + ": parent id " +
                         std::to_string(p) + " out of range");
      if (p == cpt.child)
        throw ParseError("CPT for " + var_str(cpt.child) + ": child listed as parent");
      cpt.parent_cards.push_back(cardinalities[static_cast<std::size_t>(p)]);
      rows *= static_cast<std::size_t>(cardinalities[static_cast<std::size_t>(p)]);
    }
    const std::size_t expect = rows * static_cast<std::size_t>(cpt.child_card);
    if (cpt.table.size() != expect)
      throw ParseError("CPT for " + var_str(cpt.child) + ": expected " +
                       std::to_string(expect) + " entries, got " +
                       std::to_string(cpt.table.size()));

    for (double e : cpt.table)
      if (!(e >= 0.0) || e > 1.0 + 1e-9 || !std::isfinite(e))
        throw ParseError("CPT for " + var_str(cpt.child) + ": entry " +
                         std::to_string(e) + " outside [0, 1]");

    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (int v = 0; v < cpt.child_card; ++v)
        sum += cpt.table[r * static_cast<std::size_t>(cpt.child_card) +
                         static_cast<std::size_t>(v)];
      const double off = std::abs(sum - 1.0);
      if (off > kRenormLimit)
        throw ParseError("CPT for " + var_str(cpt.child) + ": row " + std::to_string(r) +
                         " sums to " + std::to_string(sum));
      if (off > kRenormSkip) {
        for (int v = 0; v < cpt.child_card; ++v)
          cpt.table[r * static_cast<std::size_t>(cpt.child_card) +
                    static_cast<std::size_t>(v)] /= sum;
        if (warnings)
          warnings->push_back("CPT for " + var_str(cpt.child) + ": row " +
                              std::to_string(r) + " renormalized (sum was " +
                              std::to_string(sum) + ")");
      }
    }

    cpt.log_table.resize(cpt.table.size());
    for (std::size_t i = 0; i < cpt.table.size(); ++i)
      cpt.log_table[i] = logspace::from_linear(cpt.table[i]);

    net.cpts_[static_cast<std::size_t>(cpt.child)] = std::move(cpt);
  }

  // Acyclicity of the parent relation (Kahn).
  std::vector<int> indeg(static_cast<std::size_t>(n), 0);
  for (const Cpt& c : net.cpts_) indeg[static_cast<std::size_t>(c.child)] = static_cast<int>(c.parents.size());
  std::vector<std::vector<int>> child_of(static_cast<std::size_t>(n));
  for (const Cpt& c : net.cpts_)
    for (int p : c.parents) child_of[static_cast<std::size_t>(p)].push_back(c.child);
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  int processed = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++processed;
    for (int c : child_of[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (processed != n) throw ParseError("cycle detected in the parent relation");

  return net;
}

BayesianNetwork parse_network(std::string_view text, std::vector<std::string>* warnings) {
  detail::TokenReader in(text, "network");
  const std::string_view kind = in.next("format tag");
  if (kind != "BAYES")
    throw ParseError("network: expected BAYES header, got '" + std::string(kind) + "'");

  const long long n = in.next_int("variable count");
  if (n < 1) throw ParseError("network: variable count must be positive");

  std::vector<int> cards(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const long long c = in.next_int("cardinality");
    if (c < 1) throw ParseError("network: " + var_str(static_cast<int>(i)) + " has cardinality " + std::to_string(c));
    cards[static_cast<std::size_t>(i)] = static_cast<int>(c);
  }

  const long long nfact = in.next_int("factor count");
  if (nfact != n)
    throw ParseError("network: factor count " + std::to_string(nfact) +
                     " does not match variable count " + std::to_string(n));

  std::vector<Cpt> cpts(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const long long scope = in.next_int("scope size");
    if (scope < 1 || scope > n)
      throw ParseError("network: factor " + std::to_string(i) + " has scope size " +
                       std::to_string(scope));
    std::vector<int> ids(static_cast<std::size_t>(scope));
    for (long long k = 0; k < scope; ++k) {
      const long long v = in.next_int("scope variable id");
      if (v < 0 || v >= n)
        throw ParseError("network: factor " + std::to_string(i) + " references " +
                         var_str(static_cast<int>(v)));
      ids[static_cast<std::size_t>(k)] = static_cast<int>(v);
    }
    Cpt& cpt = cpts[static_cast<std::size_t>(i)];
    cpt.child = ids.back();
    cpt.parents.assign(ids.begin(), ids.end() - 1);
  }

  for (long long i = 0; i < n; ++i) {
    Cpt& cpt = cpts[static_cast<std::size_t>(i)];
    const long long count = in.next_int("table entry count");
    if (count < 1)
      throw ParseError("network: factor " + std::to_string(i) + " has entry count " +
                       std::to_string(count));
    cpt.table.resize(static_cast<std::size_t>(count));
    for (long long k = 0; k < count; ++k)
      cpt.table[static_cast<std::size_t>(k)] = in.next_real("table entry");
  }

  if (!in.at_end()) throw ParseError("network: trailing tokens after last table");

  return BayesianNetwork::make(std::move(cards), std::move(cpts), warnings);
}

BayesianNetwork load_network(const std::string& path, std::vector<std::string>* warnings) {
  return parse_network(detail::read_file(path, "network"), warnings);
}

void serialize_network(const BayesianNetwork& net, std::ostream& os) {
  const int n = net.num_vars();
  os << "BAYES\n" << n << "\n";
  for (int v = 0; v < n; ++v) os << (v ? " " : "") << net.cardinality(v);
  os << "\n" << n << "\n";
  for (int v = 0; v < n; ++v) {
    const Cpt& cpt = net.cpt(v);
    os << (cpt.parents.size() + 1);
    for (int p : cpt.parents) os << " " << p;
    os << " " << cpt.child << "\n";
  }
  char buf[64];
  for (int v = 0; v < n; ++v) {
    const Cpt& cpt = net.cpt(v);
    os << "\n" << cpt.table.size() << "\n";
    const std::size_t row = static_cast<std::size_t>(cpt.child_card);
    for (std::size_t i = 0; i < cpt.table.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", cpt.table[i]);
      os << buf << ((i + 1) % row == 0 ? "\n" : " ");
    }
  }
}

Evidence::Evidence(std::vector<std::pair<int, int>> items, const BayesianNetwork& net)
    : items_(std::move(items)), value_of_(static_cast<std::size_t>(net.num_vars()), -1) {
  std::sort(items_.begin(), items_.end());
  for (const auto& [var, value] : items_) {
    if (var < 0 || var >= net.num_vars())
      throw ParseError("evidence: " + var_str(var) + " out of range");
    if (value < 0 || value >= net.cardinality(var))
      throw ParseError("evidence: value " + std::to_string(value) + " out of range for " +
                       var_str(var));
    if (value_of_[static_cast<std::size_t>(var)] >= 0)
      throw ParseError("evidence: duplicate " + var_str(var));
    value_of_[static_cast<std::size_t>(var)] = value;
  }
}

Evidence parse_evidence(std::string_view text, const BayesianNetwork& net) {
  detail::TokenReader in(text, "evidence");
  const long long k = in.next_int("evidence count");
  if (k < 0) throw ParseError("evidence: negative count");
  std::vector<std::pair<int, int>> items;
  items.reserve(static_cast<std::size_t>(k));
  for (long long i = 0; i < k; ++i) {
    const long long var = in.next_int("variable id");
    const long long value = in.next_int("value");
    items.emplace_back(static_cast<int>(var), static_cast<int>(value));
  }
  if (!in.at_end()) throw ParseError("evidence: trailing tokens");
  return Evidence(std::move(items), net);
}

Evidence load_evidence(const std::string& path, const BayesianNetwork& net) {
  return parse_evidence(detail::read_file(path, "evidence"), net);
}

double joint_weight(const BayesianNetwork& net, const Assignment& full,
                    const Evidence& evidence) {
  const int n = net.num_vars();
  thread_local std::vector<int> values;
  values.assign(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    if (evidence.observed(v)) {
      values[static_cast<std::size_t>(v)] = evidence.value(v);
    } else {
      if (!full.assigned(v))
        throw std::invalid_argument("joint_weight: " + var_str(v) + " unassigned");
      values[static_cast<std::size_t>(v)] = full[v];
    }
  }
  double acc = 0.0;
  for (int v = 0; v < n; ++v) {
    const double le = net.cpt(v).log_entry(values.data());
    if (logspace::is_zero(le)) return logspace::kLogZero;
    acc += le;
  }
  return acc;
}

ScopePartition exactly_one_scope_partition(const BayesianNetwork& net,
                                           const Evidence& evidence,
                                           const PseudoTree& tree) {
  const int n = net.num_vars();
  ScopePartition part;
  part.cpts_at.resize(static_cast<std::size_t>(n));

  std::vector<int> clamped(static_cast<std::size_t>(n), -1);
  for (const auto& [var, value] : evidence.items())
    clamped[static_cast<std::size_t>(var)] = value;

  for (int child = 0; child < n; ++child) {
    const Cpt& cpt = net.cpt(child);
    int deepest = -1;
    auto consider = [&](int v) {
      if (evidence.observed(v)) return;
      if (!tree.contains(v))
        throw ConfigError("scope partition: pseudo-tree is missing " + var_str(v));
      if (deepest < 0 || tree.depth[static_cast<std::size_t>(v)] >
                             tree.depth[static_cast<std::size_t>(deepest)])
        deepest = v;
    };
    consider(child);
    for (int p : cpt.parents) consider(p);

    if (deepest < 0) {
      // Fully observed scope: a constant factor with no host variable.
      std::vector<int> values = clamped;
      part.log_constant += cpt.log_entry(values.data());
    } else {
      part.cpts_at[static_cast<std::size_t>(deepest)].push_back(child);
    }
  }
  return part;
}

}  // namespace aois
