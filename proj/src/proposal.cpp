#include "aois/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "aois/error.hpp"
#include "text_io.hpp"

namespace aois {

namespace {

constexpr double kRowSumTol = 1e-9;

void normalize_row(std::vector<double>& probs, std::size_t begin, std::size_t card,
                   const char* what, int var) {
  double sum = 0.0;
  for (std::size_t i = 0; i < card; ++i) sum += probs[begin + i];
  if (sum <= 0.0)
    return;  // all-zero rows are tolerated until sampling reaches them
  if (std::abs(sum - 1.0) > kRowSumTol)
    throw ParseError(std::string(what) + ": row for variable " + std::to_string(var) +
                     " sums to " + std::to_string(sum));
  if (sum != 1.0)
    for (std::size_t i = 0; i < card; ++i) probs[begin + i] /= sum;
}

void fill_logs(FactoredProposal::Factor& f) {
  f.logs.resize(f.probs.size());
  for (std::size_t i = 0; i < f.probs.size(); ++i)
    f.logs[i] = logspace::from_linear(f.probs[i]);
}

// Y_i must live strictly above X_i inside its context; anything else would
// make the arc weight depend on variables outside the merge key.
void check_conditioning_set(const FactoredProposal::Factor& f, const ContextMap& contexts) {
  const auto& ctx = contexts.context[static_cast<std::size_t>(f.var)];
  for (int y : f.cond) {
    if (y == f.var)
      throw ParseError("proposal: variable " + std::to_string(f.var) +
                       " conditions on itself");
    if (std::find(ctx.begin() + 1, ctx.end(), y) == ctx.end())
      throw ParseError("proposal: variable " + std::to_string(f.var) + " conditions on " +
                       std::to_string(y) + ", which is outside its context");
  }
}

}  // namespace

FactoredProposal prior_proposal(const BayesianNetwork& net, const Evidence& evidence,
                                const PseudoTree& tree, const ContextMap& contexts) {
  FactoredProposal q;
  q.order_ = tree.preorder;
  q.factors_.resize(static_cast<std::size_t>(net.num_vars()));

  for (int v : tree.preorder) {
    const Cpt& cpt = net.cpt(v);
    for (int p : cpt.parents)
      if (!evidence.observed(p) &&
          !(tree.contains(p) && tree.is_ancestor_or_self(p, v) && p != v))
        throw ConfigError("prior proposal: parent " + std::to_string(p) +
                          " of variable " + std::to_string(v) +
                          " is not a pseudo-tree ancestor; use a topological order");

    FactoredProposal::Factor f;
    f.var = v;
    f.card = net.cardinality(v);
    for (int p : cpt.parents)
      if (!evidence.observed(p)) {
        f.cond.push_back(p);
        f.cond_cards.push_back(net.cardinality(p));
      }

    std::size_t rows = 1;
    for (int c : f.cond_cards) rows *= static_cast<std::size_t>(c);
    f.probs.resize(rows * static_cast<std::size_t>(f.card));

    // Enumerate the free-parent configurations; observed parents are clamped.
    std::vector<int> values(static_cast<std::size_t>(net.num_vars()), 0);
    for (const auto& [var, val] : evidence.items()) values[static_cast<std::size_t>(var)] = val;
    std::vector<int> digits(f.cond.size(), 0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < f.cond.size(); ++k)
        values[static_cast<std::size_t>(f.cond[k])] = digits[k];
      const std::size_t out = r * static_cast<std::size_t>(f.card);
      for (int x = 0; x < f.card; ++x) {
        values[static_cast<std::size_t>(v)] = x;
        f.probs[out + static_cast<std::size_t>(x)] = cpt.table[cpt.entry_index(values.data())];
      }
      normalize_row(f.probs, out, static_cast<std::size_t>(f.card), "prior proposal", v);
      for (std::size_t k = f.cond.size(); k-- > 0;) {
        if (++digits[k] < f.cond_cards[k]) break;
        digits[k] = 0;
      }
    }
    fill_logs(f);
    check_conditioning_set(f, contexts);
    q.factors_[static_cast<std::size_t>(v)] = std::move(f);
  }
  return q;
}

FactoredProposal uniform_proposal(const BayesianNetwork& net, const Evidence& evidence,
                                  const PseudoTree& tree) {
  (void)evidence;
  FactoredProposal q;
  q.order_ = tree.preorder;
  q.factors_.resize(static_cast<std::size_t>(net.num_vars()));
  for (int v : tree.preorder) {
    FactoredProposal::Factor f;
    f.var = v;
    f.card = net.cardinality(v);
    f.probs.assign(static_cast<std::size_t>(f.card), 1.0 / static_cast<double>(f.card));
    fill_logs(f);
    q.factors_[static_cast<std::size_t>(v)] = std::move(f);
  }
  return q;
}

FactoredProposal parse_proposal(std::string_view text, const BayesianNetwork& net,
                                const Evidence& evidence, const PseudoTree& tree,
                                const ContextMap& contexts) {
  detail::TokenReader in(text, "proposal");
  FactoredProposal q;
  q.order_ = tree.preorder;
  q.factors_.resize(static_cast<std::size_t>(net.num_vars()));
  std::vector<char> seen(static_cast<std::size_t>(net.num_vars()), 0);

  while (!in.at_end()) {
    std::string_view tok = in.next("'var'");
    if (tok != "var")
      throw ParseError("proposal: expected 'var', got '" + std::string(tok) + "'");
    const long long v = in.next_int("variable id");
    if (v < 0 || v >= net.num_vars())
      throw ParseError("proposal: variable " + std::to_string(v) + " out of range");
    if (evidence.observed(static_cast<int>(v)))
      throw ParseError("proposal: variable " + std::to_string(v) + " is observed");
    if (seen[static_cast<std::size_t>(v)])
      throw ParseError("proposal: duplicate block for variable " + std::to_string(v));
    seen[static_cast<std::size_t>(v)] = 1;

    tok = in.next("'|'");
    if (tok != "|")
      throw ParseError("proposal: expected '|', got '" + std::string(tok) + "'");

    FactoredProposal::Factor f;
    f.var = static_cast<int>(v);
    f.card = net.cardinality(f.var);
    // The conditioning ids finish the header line; the table follows in
    // free-form whitespace.
    std::size_t expect = static_cast<std::size_t>(f.card);
    while (!in.at_line_end()) {
      const long long y = in.next_int("conditioning id");
      if (y < 0 || y >= net.num_vars())
        throw ParseError("proposal: variable " + std::to_string(v) +
                         " conditions on out-of-range variable " + std::to_string(y));
      f.cond.push_back(static_cast<int>(y));
      f.cond_cards.push_back(net.cardinality(static_cast<int>(y)));
      expect *= static_cast<std::size_t>(net.cardinality(static_cast<int>(y)));
    }
    const long long count = in.next_int("table entry count");
    if (count < 0 || static_cast<std::size_t>(count) != expect)
      throw ParseError("proposal: variable " + std::to_string(v) + ": expected " +
                       std::to_string(expect) + " entries, got " + std::to_string(count));

    f.probs.resize(expect);
    for (std::size_t i = 0; i < expect; ++i) f.probs[i] = in.next_real("table entry");
    for (double p : f.probs)
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ParseError("proposal: variable " + std::to_string(v) + ": negative entry");
    for (std::size_t r = 0; r * static_cast<std::size_t>(f.card) < expect; ++r)
      normalize_row(f.probs, r * static_cast<std::size_t>(f.card),
                    static_cast<std::size_t>(f.card), "proposal", f.var);
    fill_logs(f);
    check_conditioning_set(f, contexts);
    q.factors_[static_cast<std::size_t>(f.var)] = std::move(f);
  }

  for (int v : tree.preorder)
    if (!seen[static_cast<std::size_t>(v)])
      throw ParseError("proposal: no block for variable " + std::to_string(v));

  // Sampling-order soundness: conditioning variables precede their owner.
  std::vector<int> pos(static_cast<std::size_t>(net.num_vars()), -1);
  for (std::size_t i = 0; i < q.order_.size(); ++i)
    pos[static_cast<std::size_t>(q.order_[i])] = static_cast<int>(i);
  for (int v : q.order_)
    for (int y : q.factors_[static_cast<std::size_t>(v)].cond)
      if (pos[static_cast<std::size_t>(y)] >= pos[static_cast<std::size_t>(v)])
        throw ParseError("proposal: variable " + std::to_string(v) + " conditions on " +
                         std::to_string(y) + ", which is sampled later");

  return q;
}

FactoredProposal load_proposal(const std::string& path, const BayesianNetwork& net,
                               const Evidence& evidence, const PseudoTree& tree,
                               const ContextMap& contexts) {
  return parse_proposal(detail::read_file(path, "proposal"), net, evidence, tree, contexts);
}

void serialize_proposal(const FactoredProposal& proposal, std::ostream& os) {
  char buf[64];
  for (int v : proposal.order()) {
    const auto& f = proposal.factor(v);
    os << "var " << v << " |";
    for (int y : f.cond) os << " " << y;
    os << "\n" << f.probs.size() << "\n";
    for (std::size_t i = 0; i < f.probs.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", f.probs[i]);
      os << buf
         << ((i + 1) % static_cast<std::size_t>(f.card) == 0 ? "\n" : " ");
    }
  }
}

void draw_sample(const FactoredProposal& proposal, Philox& rng, SampleRecord& out) {
  out.assignment.values.assign(proposal.num_vars(), Assignment::kUnassigned);
  out.log_q_per_var.resize(proposal.order().size());
  out.log_q = 0.0;

  std::size_t i = 0;
  for (int v : proposal.order()) {
    const auto& f = proposal.factor(v);
    const std::size_t row = f.row_index(out.assignment.values.data());
    const double u = rng.uniform();
    double acc = 0.0;
    int picked = -1;
    for (int x = 0; x < f.card; ++x) {
      const double p = f.probs[row + static_cast<std::size_t>(x)];
      if (p <= 0.0) continue;
      acc += p;
      picked = x;
      if (u < acc) break;
    }
    if (picked < 0)
      throw ConfigError("draw_sample: all-zero conditional row for variable " +
                        std::to_string(v) + " (inconsistent proposal)");
    out.assignment.set(v, picked);
    const double lq = f.logs[row + static_cast<std::size_t>(picked)];
    out.log_q_per_var[i++] = lq;
    out.log_q += lq;
  }
}

SampleRecord draw_sample(const FactoredProposal& proposal, Philox& rng) {
  SampleRecord rec;
  draw_sample(proposal, rng, rec);
  return rec;
}

double density(const FactoredProposal& proposal, const Assignment& assignment) {
  double acc = 0.0;
  for (int v : proposal.order()) {
    const double lq = proposal.log_conditional(v, assignment[v], assignment.values.data());
    if (logspace::is_zero(lq)) return logspace::kLogZero;
    acc += lq;
  }
  return acc;
}

}  // namespace aois
