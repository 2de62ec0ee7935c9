#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "aois/commands.hpp"
#include "aois/error.hpp"
#include "aois/oracle.hpp"
#include "aois/runner.hpp"

namespace py = pybind11;
using namespace aois;

namespace {

OrderSpec order_from_string(const std::string& s) {
  OrderSpec spec;
  if (s == "minfill") {
    spec.kind = OrderSpec::Kind::minfill;
  } else if (s == "topological") {
    spec.kind = OrderSpec::Kind::topological;
  } else if (s.rfind("file:", 0) == 0) {
    spec.kind = OrderSpec::Kind::file;
    spec.path = s.substr(5);
  } else {
    throw ConfigError("order must be minfill, topological or file:PATH");
  }
  return spec;
}

ProposalSpec proposal_from_string(const std::string& s) {
  ProposalSpec spec;
  if (s == "prior") {
    spec.kind = ProposalSpec::Kind::prior;
  } else if (s == "uniform") {
    spec.kind = ProposalSpec::Kind::uniform;
  } else if (s.rfind("file:", 0) == 0) {
    spec.kind = ProposalSpec::Kind::file;
    spec.path = s.substr(5);
  } else {
    throw ConfigError("proposal must be prior, uniform or file:PATH");
  }
  return spec;
}

EstimatorKind kind_from_string(const std::string& s) {
  if (s == "is") return EstimatorKind::is;
  if (s == "aotree") return EstimatorKind::aotree;
  if (s == "aograph") return EstimatorKind::aograph;
  throw ConfigError("unknown estimator '" + s + "'");
}

EstimateSetup build_setup(const BayesianNetwork& net, const Evidence& ev,
                          const std::string& order, const std::string& proposal) {
  return make_setup(net, ev, order_from_string(order), proposal_from_string(proposal));
}

}  // namespace

PYBIND11_MODULE(_aois, m) {
  m.doc() = "Probability-of-evidence estimation by importance sampling over "
            "AND/OR sample trees and graphs";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<BayesianNetwork>(m, "BayesianNetwork")
      .def_property_readonly("num_vars", &BayesianNetwork::num_vars)
      .def("cardinality", &BayesianNetwork::cardinality, py::arg("var"))
      .def("__repr__", [](const BayesianNetwork& net) {
        return "<BayesianNetwork n=" + std::to_string(net.num_vars()) + ">";
      });

  py::class_<Evidence>(m, "Evidence")
      .def_property_readonly("items", &Evidence::items)
      .def("__len__", &Evidence::size);

  m.def("parse_network",
        [](const std::string& text) { return parse_network(text, nullptr); },
        py::arg("text"));
  m.def("load_network",
        [](const std::string& path) { return load_network(path, nullptr); },
        py::arg("path"));
  m.def("parse_evidence",
        [](const std::string& text, const BayesianNetwork& net) {
          return parse_evidence(text, net);
        },
        py::arg("text"), py::arg("net"));
  m.def("load_evidence", &load_evidence, py::arg("path"), py::arg("net"));
  m.def("evidence",
        [](const std::vector<std::pair<int, int>>& items, const BayesianNetwork& net) {
          return Evidence(items, net);
        },
        py::arg("items"), py::arg("net"));

  m.def("exact_pe",
        [](const BayesianNetwork& net, const Evidence& ev, const std::string& method,
           const std::string& order) {
          if (method == "enum") return oracle::exact_pe_enumeration(net, ev);
          if (method != "aosearch") throw ConfigError("method must be enum or aosearch");
          EstimateSetup s = build_setup(net, ev, order, "uniform");
          return oracle::exact_pe_ao_search(s.net, s.evidence, s.tree, s.contexts);
        },
        py::arg("net"), py::arg("evidence"), py::arg("method") = "aosearch",
        py::arg("order") = "topological",
        "Exact log probability of evidence (natural log).");

  m.def("estimate",
        [](const BayesianNetwork& net, const Evidence& ev,
           const std::vector<std::string>& estimators, std::uint64_t samples,
           std::uint64_t seed, const std::string& proposal, const std::string& order,
           const std::vector<std::uint64_t>& checkpoints) {
          EstimateSetup s = build_setup(net, ev, order, proposal);
          std::vector<EstimatorKind> kinds;
          for (const std::string& e : estimators) kinds.push_back(kind_from_string(e));
          RunOutput out = run_estimators(s, kinds, samples, seed, 0, checkpoints);
          py::list rows;
          for (EstimatorKind k : kinds)
            for (const CheckpointRow& row : out.traces[k].rows) {
              py::dict d;
              d["estimator"] = estimator_name(k);
              d["n"] = row.n;
              d["log_estimate"] = row.log_estimate;
              d["estimate"] = logspace::to_linear(row.log_estimate);
              rows.append(d);
            }
          return rows;
        },
        py::arg("net"), py::arg("evidence"),
        py::arg("estimators") = std::vector<std::string>{"is", "aotree", "aograph"},
        py::arg("samples") = 1000, py::arg("seed") = 1, py::arg("proposal") = "prior",
        py::arg("order") = "topological",
        py::arg("checkpoints") = std::vector<std::uint64_t>{},
        "Run the selected estimators over one shared sample stream.");

  m.def("variance_study",
        [](const BayesianNetwork& net, const Evidence& ev,
           const std::vector<std::string>& estimators, std::uint64_t samples,
           int replicates, std::uint64_t seed, const std::string& proposal,
           const std::string& order, int threads) {
          EstimateSetup s = build_setup(net, ev, order, proposal);
          py::list rows;
          for (const std::string& e : estimators) {
            const EstimatorKind k = kind_from_string(e);
            oracle::ReplicateStats stats = oracle::empirical_variance(
                [&](std::uint64_t stream) {
                  return run_single_estimate(s, k, samples, seed, stream);
                },
                replicates, threads);
            py::dict d;
            d["estimator"] = e;
            d["mean"] = stats.mean;
            d["variance"] = stats.variance;
            d["std_error"] = stats.std_error;
            rows.append(d);
          }
          return rows;
        },
        py::arg("net"), py::arg("evidence"),
        py::arg("estimators") = std::vector<std::string>{"is", "aotree", "aograph"},
        py::arg("samples") = 1000, py::arg("replicates") = 10, py::arg("seed") = 1,
        py::arg("proposal") = "prior", py::arg("order") = "topological",
        py::arg("threads") = 1);

  m.def("info",
        [](const BayesianNetwork& net, const Evidence& ev, const std::string& order) {
          EstimateSetup s = build_setup(net, ev, order, "uniform");
          py::dict d;
          d["n"] = s.net.num_vars();
          d["evidence"] = s.evidence.size();
          d["max_domain"] = s.net.max_cardinality();
          d["induced_width"] = s.contexts.width();
          py::dict ctx;
          for (int v : s.tree.preorder)
            ctx[py::int_(v)] = s.contexts.context[static_cast<std::size_t>(v)];
          d["contexts"] = ctx;
          return d;
        },
        py::arg("net"), py::arg("evidence"), py::arg("order") = "topological");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
