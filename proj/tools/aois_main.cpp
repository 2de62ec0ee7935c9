#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "aois/commands.hpp"
#include "aois/error.hpp"

namespace {

aois::OrderSpec parse_order(const std::string& s) {
  aois::OrderSpec spec;
  if (s == "minfill") {
    spec.kind = aois::OrderSpec::Kind::minfill;
  } else if (s == "topological") {
    spec.kind = aois::OrderSpec::Kind::topological;
  } else if (s.rfind("file:", 0) == 0) {
    spec.kind = aois::OrderSpec::Kind::file;
    spec.path = s.substr(5);
  } else {
    throw aois::ConfigError("--order must be minfill, topological or file:PATH");
  }
  return spec;
}

aois::ProposalSpec parse_proposal_spec(const std::string& s) {
  aois::ProposalSpec spec;
  if (s == "prior") {
    spec.kind = aois::ProposalSpec::Kind::prior;
  } else if (s == "uniform") {
    spec.kind = aois::ProposalSpec::Kind::uniform;
  } else if (s.rfind("file:", 0) == 0) {
    spec.kind = aois::ProposalSpec::Kind::file;
    spec.path = s.substr(5);
  } else {
    throw aois::ConfigError("--proposal must be prior, uniform or file:PATH");
  }
  return spec;
}

std::vector<aois::EstimatorKind> parse_estimators(const std::string& s) {
  std::vector<aois::EstimatorKind> kinds;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "is")
      kinds.push_back(aois::EstimatorKind::is);
    else if (item == "aotree")
      kinds.push_back(aois::EstimatorKind::aotree);
    else if (item == "aograph")
      kinds.push_back(aois::EstimatorKind::aograph);
    else
      throw aois::ConfigError("unknown estimator '" + item +
                              "' (expected is, aotree, aograph)");
  }
  if (kinds.empty()) throw aois::ConfigError("--estimators must name at least one estimator");
  return kinds;
}

std::vector<std::uint64_t> parse_checkpoints(const std::string& s) {
  std::vector<std::uint64_t> cps;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      cps.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw aois::ConfigError("bad checkpoint '" + item + "'");
    }
  }
  return cps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probability-of-evidence estimation by importance sampling with "
               "sample trees and sample graphs over the network's pseudo-tree"};
  app.require_subcommand(1);

  aois::RunConfig config;
  std::string order_str = "topological";
  std::string proposal_str = "prior";
  std::string estimators_str = "is,aotree,aograph";
  std::string checkpoints_str;
  std::string output_path;
  std::string exact_method_str = "aosearch";

  auto add_common = [&](CLI::App* cmd, bool sampling) {
    cmd->add_option("--network", config.network_path, "Network file (UAI Bayes format)")
        ->required();
    cmd->add_option("--evidence", config.evidence_path, "Evidence file");
    cmd->add_option("--order", order_str, "minfill | topological | file:PATH");
    cmd->add_option("--output", output_path, "Write CSV here instead of stdout");
    if (sampling) {
      cmd->add_option("--proposal", proposal_str, "prior | uniform | file:PATH");
      cmd->add_option("--estimators", estimators_str, "Comma list of is,aotree,aograph");
      cmd->add_option("--samples", config.samples, "Number of samples N");
      cmd->add_option("--seed", config.seed, "RNG seed");
      cmd->add_option("--checkpoints", checkpoints_str,
                      "Comma list of sample counts for running estimates");
      cmd->add_flag("--timings", config.timings,
                    "Fill the wall_ms column (off keeps output byte-stable)");
    }
  };

  CLI::App* estimate = app.add_subcommand("estimate", "Run estimators, one row per checkpoint");
  add_common(estimate, true);
  CLI::App* compare =
      app.add_subcommand("compare", "Convergence table with an exact column when feasible");
  add_common(compare, true);
  CLI::App* variance = app.add_subcommand("variance-study", "Replicate mean/variance per estimator");
  add_common(variance, true);
  variance->add_option("--replicates", config.replicates, "Replicate count R")->required();
  variance->add_option("--threads", config.threads, "Concurrent replicate workers");
  CLI::App* info = app.add_subcommand("info", "Structure report: width and contexts");
  add_common(info, false);
  CLI::App* exact = app.add_subcommand("exact", "Exact P(e) by enumeration or search");
  add_common(exact, false);
  exact->add_option("--method", exact_method_str, "enum | aosearch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    config.order = parse_order(order_str);
    config.proposal = parse_proposal_spec(proposal_str);
    config.estimators = parse_estimators(estimators_str);
    if (!checkpoints_str.empty()) config.checkpoints = parse_checkpoints(checkpoints_str);

    std::ostringstream csv;
    if (estimate->parsed()) {
      aois::cmd_estimate(config, csv);
    } else if (compare->parsed()) {
      aois::cmd_compare(config, csv);
    } else if (variance->parsed()) {
      aois::cmd_variance_study(config, csv);
    } else if (info->parsed()) {
      aois::cmd_info(config, csv);
    } else if (exact->parsed()) {
      aois::ExactMethod method;
      if (exact_method_str == "enum")
        method = aois::ExactMethod::enumeration;
      else if (exact_method_str == "aosearch")
        method = aois::ExactMethod::aosearch;
      else
        throw aois::ConfigError("--method must be enum or aosearch");
      aois::cmd_exact(config, method, csv);
    }

    if (output_path.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream out(output_path, std::ios::binary);
      if (!out) throw aois::ConfigError("cannot open output file '" + output_path + "'");
      out << csv.str();
    }
    return 0;
  } catch (const aois::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const aois::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const aois::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
