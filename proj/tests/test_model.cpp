#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "aois/error.hpp"
#include "aois/model.hpp"
#include "aois/oracle.hpp"
#include "aois/structure.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace aois;
using namespace aois::testing;

namespace {

const char* kSingleVar = "BAYES 1 2 1 1 0 2 0.3 0.7";
const char* kChainAB =
    "BAYES\n2\n2 2\n2\n1 0\n2 0 1\n\n2\n0.6 0.4\n\n4\n0.9 0.1 0.2 0.8\n";

}  // namespace

TEST_CASE("parse: single binary variable reads back") {
  BayesianNetwork net = parse_network(kSingleVar);
  CHECK(net.num_vars() == 1);
  CHECK(net.cardinality(0) == 2);
  CHECK(net.cpt(0).table[1] == 0.7);
}

TEST_CASE("parse: two-variable chain joint sums to one") {
  BayesianNetwork net = parse_network(kChainAB);
  Evidence ev = no_evidence(net);
  double total = 0.0;
  Assignment a(2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      a.set(0, x);
      a.set(1, y);
      total += std::exp(joint_weight(net, a, ev));
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parse: malformed inputs") {
  CHECK_THROWS_AS(parse_network("MARKOV 1 2 1 1 0 2 0.5 0.5"), ParseError);
  CHECK_THROWS_AS(parse_network("BAYES 2 2 2 1 1 0 2 0.5 0.5"), ParseError);  // count mismatch
  CHECK_THROWS_AS(parse_network("BAYES 1 2 1 1 0 2 0.5 x"), ParseError);
  CHECK_THROWS_AS(parse_network("BAYES 1 2 1 1 0 2 0.5"), ParseError);  // truncated
}

TEST_CASE("parse: row sum handling") {
  // deliberate row summing to 0.9 in a 7-variable file
  std::ostringstream bad;
  bad << "BAYES 7 2 2 2 2 2 2 2 7\n";
  for (int v = 0; v < 7; ++v) bad << "1 " << v << "\n";
  bad << "2 0.5 0.5\n2 0.5 0.5\n2 0.5 0.5\n2 0.5 0.5\n2 0.5 0.5\n2 0.5 0.5\n2 0.4 0.5\n";
  CHECK_THROWS_AS(parse_network(bad.str()), ParseError);

  // a small wobble is renormalized with a warning
  std::vector<std::string> warnings;
  BayesianNetwork net = parse_network("BAYES 1 2 1 1 0 2 0.3000000001 0.7", &warnings);
  CHECK(warnings.size() == 1);
  const double sum = net.cpt(0).table[0] + net.cpt(0).table[1];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("parse: cycle detected") {
  const char* cyclic = "BAYES 2 2 2 2 2 1 0 2 0 1 4 .5 .5 .5 .5 4 .5 .5 .5 .5";
  CHECK_THROWS_WITH_AS(parse_network(cyclic), doctest::Contains("cycle"), ParseError);
}

TEST_CASE("serialize round-trips bit-exactly") {
  Philox rng(5, 0);
  BayesianNetwork net = random_network(9, 3, 17);
  std::ostringstream first;
  serialize_network(net, first);
  BayesianNetwork reparsed = parse_network(first.str());
  for (int v = 0; v < net.num_vars(); ++v) {
    REQUIRE(reparsed.cpt(v).table.size() == net.cpt(v).table.size());
    for (std::size_t i = 0; i < net.cpt(v).table.size(); ++i)
      CHECK(reparsed.cpt(v).table[i] == net.cpt(v).table[i]);  // bit-equal
  }
  std::ostringstream second;
  serialize_network(reparsed, second);
  CHECK(first.str() == second.str());
}

TEST_CASE("evidence parsing") {
  BayesianNetwork net = random_network(7, 2, 3);
  Evidence ev = parse_evidence("2 5 0 6 1", net);
  CHECK(ev.size() == 2);
  CHECK(ev.value(5) == 0);
  CHECK(ev.value(6) == 1);
  CHECK(!ev.observed(0));

  CHECK(parse_evidence("0", net).size() == 0);
  CHECK_THROWS_AS(parse_evidence("1 9 0", net), ParseError);
  CHECK_THROWS_AS(parse_evidence("1 5 2", net), ParseError);      // value out of range
  CHECK_THROWS_AS(parse_evidence("2 5 0 5 1", net), ParseError);  // duplicate
}

TEST_CASE("joint weight") {
  BayesianNetwork one = parse_network(kSingleVar);
  Assignment a(1);
  a.set(0, 1);
  CHECK(joint_weight(one, a, no_evidence(one)) == doctest::Approx(std::log(0.7)));

  BayesianNetwork chain = parse_network(kChainAB);
  Evidence ev({{1, 1}}, chain);
  Assignment b(2);
  b.set(0, 0);
  CHECK(joint_weight(chain, b, ev) == doctest::Approx(std::log(0.6 * 0.1)));

  // a zero CPT entry yields the log-zero sentinel
  BayesianNetwork zero = BayesianNetwork::make(
      {2, 2}, {make_cpt(0, {}, {1.0, 0.0}), make_cpt(1, {0}, {0.5, 0.5, 0.5, 0.5})});
  Assignment c(2);
  c.set(0, 1);
  c.set(1, 0);
  CHECK(logspace::is_zero(joint_weight(zero, c, no_evidence(zero))));

  Assignment unset(2);
  unset.set(0, 0);
  CHECK_THROWS_AS(joint_weight(chain, unset, no_evidence(chain)), std::invalid_argument);
}

TEST_CASE("scope partition: chain and fork placement") {
  BayesianNetwork chain = parse_network(kChainAB);
  Evidence ev = no_evidence(chain);
  PrimalGraph g = moral_graph(chain, ev);
  PseudoTree t = pseudo_tree_from_order(g, topological_elimination_order(chain, ev));
  ScopePartition part = exactly_one_scope_partition(chain, ev, t);
  CHECK(part.cpts_at[0] == std::vector<int>{0});
  CHECK(part.cpts_at[1] == std::vector<int>{1});

  ForkInstance fork = ForkInstance::make();
  PrimalGraph fg = moral_graph(fork.net, fork.evidence);
  PseudoTree ft =
      pseudo_tree_from_order(fg, topological_elimination_order(fork.net, fork.evidence));
  ScopePartition fpart = exactly_one_scope_partition(fork.net, fork.evidence, ft);
  CHECK(fpart.cpts_at[0] == std::vector<int>{0});          // P(Z) at Z
  CHECK(fpart.cpts_at[1] == std::vector<int>{1, 3});       // P(X|Z) and the evidence factor
  CHECK(fpart.cpts_at[2] == std::vector<int>{2, 4});       // P(Y|Z) and the evidence factor
}

TEST_CASE("scope partition: every CPT assigned exactly once on random instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    BayesianNetwork net = random_network(10, 3, seed);
    Evidence ev = seed % 3 == 0 ? Evidence({{0, 0}, {9, 1}}, net) : no_evidence(net);
    PrimalGraph g = moral_graph(net, ev);
    PseudoTree t = pseudo_tree_from_order(g, min_fill_order(g, 0));
    ScopePartition part = exactly_one_scope_partition(net, ev, t);
    std::vector<int> assigned(10, 0);
    for (const auto& lst : part.cpts_at)
      for (int c : lst) ++assigned[static_cast<std::size_t>(c)];
    for (int v = 0; v < 10; ++v) {
      // fully observed scopes fold into the evidence constant instead
      const Cpt& cpt = net.cpt(v);
      bool all_observed = ev.observed(v);
      for (int p : cpt.parents) all_observed = all_observed && ev.observed(p);
      CHECK(assigned[static_cast<std::size_t>(v)] == (all_observed ? 0 : 1));
    }
  }
}

TEST_CASE("joint weight sums to exact P(e) over complete assignments") {
  for (std::uint64_t seed : {2ull, 11ull, 23ull}) {
    BayesianNetwork net = random_network(8, 3, seed);
    Evidence ev(seed % 2 ? std::vector<std::pair<int, int>>{{7, 1}}
                         : std::vector<std::pair<int, int>>{{0, 1}, {4, 0}},
                net);
    // reference comes from the independent search-based oracle
    PrimalGraph g = moral_graph(net, ev);
    PseudoTree t = pseudo_tree_from_order(g, min_fill_order(g, 0));
    const double exact = oracle::exact_pe_ao_search(net, ev, t, compute_contexts(t, g));

    logspace::Accumulator acc;
    std::vector<int> free;
    for (int v = 0; v < net.num_vars(); ++v)
      if (!ev.observed(v)) free.push_back(v);
    Assignment a(static_cast<std::size_t>(net.num_vars()));
    for (int v : free) a.set(v, 0);
    while (true) {
      acc.add(joint_weight(net, a, ev));
      std::size_t k = free.size();
      while (k-- > 0) {
        if (a[free[k]] + 1 < net.cardinality(free[k])) {
          a.set(free[k], a[free[k]] + 1);
          break;
        }
        a.set(free[k], 0);
      }
      if (k == static_cast<std::size_t>(-1)) break;
    }
    CHECK(acc.log_sum() == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("scope partition: pseudo-tree must cover every CPT scope") {
  BayesianNetwork net = parse_network(kChainAB);
  // tree built as if variable 0 were observed, then used without evidence
  Evidence clamp({{0, 1}}, net);
  PrimalGraph g = moral_graph(net, clamp);
  PseudoTree t = pseudo_tree_from_order(g, min_fill_order(g, 0));
  CHECK_THROWS_AS(exactly_one_scope_partition(net, no_evidence(net), t), ConfigError);
}

TEST_CASE("fully observed network reduces to the evidence constant") {
  BayesianNetwork net = parse_network(kChainAB);
  Evidence ev({{0, 0}, {1, 1}}, net);
  PrimalGraph g = moral_graph(net, ev);
  PseudoTree t = pseudo_tree_from_order(g, min_fill_order(g, 0));
  ScopePartition part = exactly_one_scope_partition(net, ev, t);
  CHECK(std::exp(part.log_constant) == doctest::Approx(0.6 * 0.1).epsilon(1e-12));
  CHECK(t.preorder.empty());
}

TEST_CASE("parse: table size must match the scope") {
  // scope says {0,1} (4 entries) but the block announces 2
  const char* bad = "BAYES 2 2 2 2 1 0 2 0 1 2 0.6 0.4 2 0.5 0.5";
  CHECK_THROWS_AS(parse_network(bad), ParseError);
}
