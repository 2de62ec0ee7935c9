#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "aois/error.hpp"
#include "aois/oracle.hpp"
#include "aois/proposal.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace aois;
using namespace aois::testing;

namespace {

struct Fixture {
  BayesianNetwork net;
  Evidence ev;
  PrimalGraph graph;
  PseudoTree tree;
  ContextMap contexts;

  static Fixture make(BayesianNetwork n, Evidence e) {
    Fixture f{std::move(n), std::move(e), {}, {}, {}};
    f.graph = moral_graph(f.net, f.ev);
    f.tree = pseudo_tree_from_order(f.graph, topological_elimination_order(f.net, f.ev));
    f.contexts = compute_contexts(f.tree, f.graph);
    return f;
  }
};

}  // namespace

TEST_CASE("prior proposal equals the CPTs on the fork") {
  ForkInstance fork = ForkInstance::make();
  Fixture f = Fixture::make(fork.net, fork.evidence);
  FactoredProposal q = prior_proposal(f.net, f.ev, f.tree, f.contexts);

  CHECK(q.factor(0).cond.empty());
  CHECK(q.factor(0).probs == f.net.cpt(0).table);
  CHECK(q.factor(1).cond == std::vector<int>{0});
  CHECK(q.factor(1).probs == f.net.cpt(1).table);
  CHECK(q.factor(2).probs == f.net.cpt(2).table);
}

TEST_CASE("prior proposal on a single variable") {
  BayesianNetwork net = BayesianNetwork::make({2}, {make_cpt(0, {}, {0.3, 0.7})});
  Fixture f = Fixture::make(net, no_evidence(net));
  FactoredProposal q = prior_proposal(f.net, f.ev, f.tree, f.contexts);
  CHECK(q.factor(0).probs == std::vector<double>{0.3, 0.7});
}

TEST_CASE("prior proposal rejects a pseudo-tree that flips a chain") {
  BayesianNetwork net = BayesianNetwork::make(
      {2, 2}, {make_cpt(0, {}, {0.6, 0.4}), make_cpt(1, {0}, {0.9, 0.1, 0.2, 0.8})});
  Evidence ev = no_evidence(net);
  PrimalGraph g = moral_graph(net, ev);
  // rooted at B: A ends up below its child
  PseudoTree flipped = parse_pseudo_tree("root 1\n0 1\n", g);
  ContextMap cm = compute_contexts(flipped, g);
  CHECK_THROWS_AS(prior_proposal(net, ev, flipped, cm), ConfigError);
}

TEST_CASE("uniform proposal rows") {
  BayesianNetwork net =
      BayesianNetwork::make({2, 3}, {make_cpt(0, {}, {0.3, 0.7}),
                                     make_cpt(1, {0}, {0.2, 0.3, 0.5, 0.1, 0.1, 0.8})});
  Fixture f = Fixture::make(net, no_evidence(net));
  FactoredProposal q = uniform_proposal(f.net, f.ev, f.tree);
  CHECK(q.factor(0).probs == std::vector<double>{0.5, 0.5});
  CHECK(q.factor(1).probs[0] == doctest::Approx(1.0 / 3));

  // full-sample density of k binary variables is 2^-k
  BayesianNetwork bins = random_chain(5, 3);
  Fixture fb = Fixture::make(bins, no_evidence(bins));
  FactoredProposal qb = uniform_proposal(fb.net, fb.ev, fb.tree);
  Assignment a(5);
  for (int v = 0; v < 5; ++v) a.set(v, 1);
  CHECK(density(qb, a) == doctest::Approx(-5 * std::log(2.0)));
}

TEST_CASE("proposal file round trip and validation") {
  ForkInstance fork = ForkInstance::make();
  Fixture f = Fixture::make(fork.net, fork.evidence);
  FactoredProposal q = uniform_proposal(f.net, f.ev, f.tree);

  std::ostringstream os;
  serialize_proposal(q, os);
  FactoredProposal q2 = parse_proposal(os.str(), f.net, f.ev, f.tree, f.contexts);
  for (int v : q.order()) {
    CHECK(q2.factor(v).cond == q.factor(v).cond);
    CHECK(q2.factor(v).probs == q.factor(v).probs);
  }

  // conditioning on a variable outside the context: X's context is {X, Z},
  // so conditioning X on Y must be rejected
  const char* bad_scope =
      "var 0 |\n2 0.5 0.5\nvar 1 | 2\n4 0.5 0.5 0.5 0.5\nvar 2 |\n2 0.5 0.5\n";
  CHECK_THROWS_AS(parse_proposal(bad_scope, f.net, f.ev, f.tree, f.contexts), ParseError);

  // unnormalized row is a hard error
  const char* bad_row = "var 0 |\n2 0.6 0.5\nvar 1 |\n2 0.5 0.5\nvar 2 |\n2 0.5 0.5\n";
  CHECK_THROWS_AS(parse_proposal(bad_row, f.net, f.ev, f.tree, f.contexts), ParseError);

  // missing block
  const char* missing = "var 0 |\n2 0.5 0.5\nvar 1 | 0\n4 0.5 0.5 0.5 0.5\n";
  CHECK_THROWS_AS(parse_proposal(missing, f.net, f.ev, f.tree, f.contexts), ParseError);
}

TEST_CASE("conditioning on a tree descendant is rejected") {
  BayesianNetwork net = BayesianNetwork::make(
      {2, 2}, {make_cpt(0, {}, {0.6, 0.4}), make_cpt(1, {0}, {0.9, 0.1, 0.2, 0.8})});
  Fixture f = Fixture::make(net, no_evidence(net));
  // tree is 0 -> 1; "var 0 | 1" conditions the root on its child
  const char* text = "var 0 | 1\n4 0.5 0.5 0.5 0.5\nvar 1 |\n2 0.5 0.5\n";
  CHECK_THROWS_AS(parse_proposal(text, f.net, f.ev, f.tree, f.contexts), ParseError);
}

TEST_CASE("draw: deterministic proposal, uniform logQ, stream reproducibility") {
  BayesianNetwork net = random_chain(2, 9);
  Fixture f = Fixture::make(net, no_evidence(net));

  // all mass on one value per row
  const char* point = "var 0 |\n2 0 1\nvar 1 | 0\n4 1 0 0 1\n";
  FactoredProposal qp = parse_proposal(point, f.net, f.ev, f.tree, f.contexts);
  Philox rng(1, 0);
  SampleRecord rec = draw_sample(qp, rng);
  CHECK(rec.assignment[0] == 1);
  CHECK(rec.assignment[1] == 1);
  CHECK(rec.log_q == 0.0);

  FactoredProposal qu = uniform_proposal(f.net, f.ev, f.tree);
  for (int i = 0; i < 10; ++i)
    CHECK(draw_sample(qu, rng).log_q == doctest::Approx(std::log(0.25)));

  // identical (seed, stream) reproduces the stream bit for bit
  Philox r1(7, 2), r2(7, 2);
  for (int i = 0; i < 50; ++i) {
    SampleRecord a = draw_sample(qu, r1);
    SampleRecord b = draw_sample(qu, r2);
    CHECK(a.assignment.values == b.assignment.values);
    CHECK(a.log_q == b.log_q);
  }
}

TEST_CASE("draw: all-zero conditional row is an error") {
  BayesianNetwork net = random_chain(2, 10);
  Fixture f = Fixture::make(net, no_evidence(net));
  const char* text = "var 0 |\n2 0 1\nvar 1 | 0\n4 1 0 0 0\n";
  FactoredProposal q = parse_proposal(text, f.net, f.ev, f.tree, f.contexts);
  Philox rng(3, 0);
  CHECK_THROWS_AS(draw_sample(q, rng), ConfigError);
}

TEST_CASE("density matches recorded logQ exactly and flags zero support") {
  ForkInstance fork = ForkInstance::make();
  Fixture f = Fixture::make(fork.net, fork.evidence);
  FactoredProposal q = prior_proposal(f.net, f.ev, f.tree, f.contexts);
  Philox rng(11, 4);
  for (int i = 0; i < 200; ++i) {
    SampleRecord rec = draw_sample(q, rng);
    CHECK(density(q, rec.assignment) == rec.log_q);  // exact, not approximate
    double sum = 0.0;
    for (double c : rec.log_q_per_var) sum += c;
    CHECK(rec.log_q == sum);
  }

  BayesianNetwork point = BayesianNetwork::make({2}, {make_cpt(0, {}, {1.0, 0.0})});
  Fixture fp = Fixture::make(point, no_evidence(point));
  FactoredProposal qp = prior_proposal(fp.net, fp.ev, fp.tree, fp.contexts);
  Assignment dead(1);
  dead.set(0, 1);
  CHECK(logspace::is_zero(density(qp, dead)));
}

TEST_CASE("empirical frequencies match Q within 4 standard errors") {
  ForkInstance fork = ForkInstance::make();
  Fixture f = Fixture::make(fork.net, fork.evidence);
  FactoredProposal q = prior_proposal(f.net, f.ev, f.tree, f.contexts);

  const int n = 100000;
  Philox rng(2024, 0);
  // joint counts over (Z, X, Y)
  std::vector<int> count(8, 0);
  for (int i = 0; i < n; ++i) {
    SampleRecord rec = draw_sample(q, rng);
    ++count[static_cast<std::size_t>(rec.assignment[0] * 4 + rec.assignment[1] * 2 +
                                     rec.assignment[2])];
  }
  for (int z = 0; z < 2; ++z)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        Assignment a(5);
        a.set(0, z);
        a.set(1, x);
        a.set(2, y);
        const double p = std::exp(density(q, a));
        const double se = std::sqrt(p * (1 - p) / n);  // exact multinomial cell se
        const double freq = count[static_cast<std::size_t>(z * 4 + x * 2 + y)] /
                            static_cast<double>(n);
        CHECK(std::abs(freq - p) <= 4 * se + 1e-12);
      }
}

TEST_CASE("support: f > 0 implies Q > 0 for the prior on small networks") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const int n = 6 + static_cast<int>(seed % 5);
    BayesianNetwork net = random_network(n, 3, seed + 60);
    Evidence ev = seed % 2 ? Evidence({{n - 1, 0}}, net) : no_evidence(net);
    Fixture f = Fixture::make(net, ev);
    FactoredProposal q = prior_proposal(f.net, f.ev, f.tree, f.contexts);

    std::vector<int> free;
    for (int v = 0; v < n; ++v)
      if (!ev.observed(v)) free.push_back(v);
    Assignment a(static_cast<std::size_t>(n));
    for (int v : free) a.set(v, 0);
    while (true) {
      const double lf = joint_weight(f.net, a, f.ev);
      if (!logspace::is_zero(lf)) CHECK(!logspace::is_zero(density(q, a)));
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
  }
}

TEST_CASE("sampling order soundness: conditioners precede their variable") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    BayesianNetwork net = random_network(10, 3, seed + 40);
    Fixture f = Fixture::make(net, no_evidence(net));
    FactoredProposal q = prior_proposal(f.net, f.ev, f.tree, f.contexts);
    std::vector<int> pos(10, -1);
    for (std::size_t i = 0; i < q.order().size(); ++i)
      pos[static_cast<std::size_t>(q.order()[i])] = static_cast<int>(i);
    for (int v : q.order())
      for (int y : q.factor(v).cond)
        CHECK(pos[static_cast<std::size_t>(y)] < pos[static_cast<std::size_t>(v)]);
  }
}
