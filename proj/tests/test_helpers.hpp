#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aois/model.hpp"
#include "aois/proposal.hpp"
#include "aois/rng.hpp"
#include "aois/runner.hpp"
#include "aois/structure.hpp"

namespace aois::testing {

inline Cpt make_cpt(int child, std::vector<int> parents, std::vector<double> table) {
  Cpt cpt;
  cpt.child = child;
  cpt.parents = std::move(parents);
  cpt.table = std::move(table);
  return cpt;
}

// Z -> X, Z -> Y with observed children A of X and B of Y; the classic
// two-branch decomposition instance. All variables binary.
struct ForkInstance {
  BayesianNetwork net;
  Evidence evidence;

  static ForkInstance make(std::vector<double> pz = {0.4, 0.6},
                           std::vector<double> px_z = {0.8, 0.2, 0.3, 0.7},
                           std::vector<double> py_z = {0.5, 0.5, 0.1, 0.9},
                           std::vector<double> pa_x = {0.7, 0.3, 0.2, 0.8},
                           std::vector<double> pb_y = {0.6, 0.4, 0.25, 0.75},
                           int a_val = 1, int b_val = 0) {
    // ids: Z=0, X=1, Y=2, A=3, B=4
    BayesianNetwork net = BayesianNetwork::make(
        {2, 2, 2, 2, 2},
        {make_cpt(0, {}, std::move(pz)), make_cpt(1, {0}, std::move(px_z)),
         make_cpt(2, {0}, std::move(py_z)), make_cpt(3, {1}, std::move(pa_x)),
         make_cpt(4, {2}, std::move(pb_y))});
    Evidence ev({{3, a_val}, {4, b_val}}, net);
    return {std::move(net), std::move(ev)};
  }
};

// Uniformly random CPT rows via a seeded counter generator, so fixtures are
// stable across runs and platforms.
inline std::vector<double> random_rows(Philox& rng, std::size_t rows, int card,
                                       double floor = 0.05) {
  std::vector<double> table(rows * static_cast<std::size_t>(card));
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (int v = 0; v < card; ++v) {
      const double x = floor + rng.uniform();
      table[r * static_cast<std::size_t>(card) + static_cast<std::size_t>(v)] = x;
      sum += x;
    }
    for (int v = 0; v < card; ++v)
      table[r * static_cast<std::size_t>(card) + static_cast<std::size_t>(v)] /= sum;
  }
  return table;
}

// Chain 0 -> 1 -> ... -> n-1 with random binary CPTs.
inline BayesianNetwork random_chain(int n, std::uint64_t seed) {
  Philox rng(seed, 900);
  std::vector<Cpt> cpts;
  cpts.push_back(make_cpt(0, {}, random_rows(rng, 1, 2)));
  for (int v = 1; v < n; ++v) cpts.push_back(make_cpt(v, {v - 1}, random_rows(rng, 2, 2)));
  return BayesianNetwork::make(std::vector<int>(static_cast<std::size_t>(n), 2),
                               std::move(cpts));
}

// Random binary DAG: each variable picks up to max_parents parents among the
// preceding ones.
inline BayesianNetwork random_network(int n, int max_parents, std::uint64_t seed,
                                      double cpt_floor = 0.05) {
  Philox rng(seed, 901);
  std::vector<Cpt> cpts;
  for (int v = 0; v < n; ++v) {
    std::vector<int> parents;
    if (v > 0) {
      const int k = std::min(v, static_cast<int>(rng.uniform() * (max_parents + 1)));
      while (static_cast<int>(parents.size()) < k) {
        const int p = static_cast<int>(rng.uniform() * v);
        bool dup = false;
        for (int q : parents) dup = dup || q == p;
        if (!dup) parents.push_back(p);
      }
      std::sort(parents.begin(), parents.end());
    }
    const std::size_t rows = static_cast<std::size_t>(1) << parents.size();
    cpts.push_back(make_cpt(v, std::move(parents), random_rows(rng, rows, 2, cpt_floor)));
  }
  return BayesianNetwork::make(std::vector<int>(static_cast<std::size_t>(n), 2),
                               std::move(cpts));
}

// Grid DAG on rows x cols binary variables: edges go right and down.
inline BayesianNetwork grid_network(int rows, int cols, std::uint64_t seed,
                                    double cpt_floor = 0.05) {
  Philox rng(seed, 902);
  const int n = rows * cols;
  std::vector<Cpt> cpts;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      std::vector<int> parents;
      if (c > 0) parents.push_back(v - 1);
      if (r > 0) parents.push_back(v - cols);
      const std::size_t nrows = static_cast<std::size_t>(1) << parents.size();
      cpts.push_back(make_cpt(v, std::move(parents), random_rows(rng, nrows, 2, cpt_floor)));
    }
  return BayesianNetwork::make(std::vector<int>(static_cast<std::size_t>(n), 2),
                               std::move(cpts));
}

inline EstimateSetup setup_for(const BayesianNetwork& net, const Evidence& ev,
                               ProposalSpec::Kind proposal = ProposalSpec::Kind::prior,
                               OrderSpec::Kind order = OrderSpec::Kind::topological) {
  OrderSpec os;
  os.kind = order;
  ProposalSpec ps;
  ps.kind = proposal;
  return make_setup(net, ev, os, ps);
}

inline Evidence no_evidence(const BayesianNetwork& net) { return Evidence({}, net); }

}  // namespace aois::testing
