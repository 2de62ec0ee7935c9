#include "aois/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <ostream>

#include "aois/error.hpp"
#include "aois/oracle.hpp"

namespace aois {

namespace {

constexpr double kLn10 = 2.302585092994045684;

std::string fmt_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_ms(double ms) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string fmt_log10(double log_e) {
  return fmt_real(log_e / kLn10);  // -inf maps to "-inf", deterministically
}

EstimateSetup setup_from(const RunConfig& config) {
  std::vector<std::string> warnings;
  BayesianNetwork net = load_network(config.network_path, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  Evidence ev = config.evidence_path.empty()
                    ? Evidence({}, net)
                    : load_evidence(config.evidence_path, net);
  return make_setup(std::move(net), std::move(ev), config.order, config.proposal);
}

std::vector<EstimatorKind> canonical(const std::vector<EstimatorKind>& ks) {
  std::vector<EstimatorKind> out;
  for (EstimatorKind k : {EstimatorKind::is, EstimatorKind::aotree, EstimatorKind::aograph})
    for (EstimatorKind given : ks)
      if (given == k) {
        out.push_back(k);
        break;
      }
  return out;
}

// Exact reference if either oracle fits the instance, graph search first.
std::optional<double> try_exact(const EstimateSetup& s) {
  try {
    return oracle::exact_pe_ao_search(s.net, s.evidence, s.tree, s.contexts);
  } catch (const ResourceError&) {
  }
  try {
    return oracle::exact_pe_enumeration(s.net, s.evidence);
  } catch (const ResourceError&) {
  }
  return std::nullopt;
}

}  // namespace

void RunConfig::validate() const {
  if (network_path.empty()) throw ConfigError("a network file is required");
  if (samples < 1) throw ConfigError("--samples must be at least 1");
  if (estimators.empty()) throw ConfigError("--estimators must name at least one estimator");
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] < 1 || checkpoints[i] > samples ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw ConfigError("--checkpoints must be ascending and within 1..N");
  if (threads < 1) throw ConfigError("--threads must be positive");
}

void cmd_estimate(const RunConfig& config, std::ostream& os) {
  config.validate();
  const EstimateSetup setup = setup_from(config);
  const std::vector<EstimatorKind> kinds = canonical(config.estimators);
  RunOutput out = run_estimators(setup, kinds, config.samples, config.seed, 0,
                                 config.checkpoints, config.timings);

  os << kCsvHeader << "\n";
  os << "estimator,n,log10_estimate,estimate,wall_ms\n";
  for (EstimatorKind k : kinds)
    for (const CheckpointRow& row : out.traces[k].rows)
      os << estimator_name(k) << "," << row.n << "," << fmt_log10(row.log_estimate) << ","
         << fmt_real(logspace::to_linear(row.log_estimate)) << ","
         << (config.timings ? fmt_ms(row.wall_ms) : "") << "\n";
}

void cmd_compare(const RunConfig& config, std::ostream& os) {
  config.validate();
  const EstimateSetup setup = setup_from(config);
  const std::vector<EstimatorKind> kinds = canonical(config.estimators);
  RunOutput out = run_estimators(setup, kinds, config.samples, config.seed, 0,
                                 config.checkpoints, config.timings);
  const std::optional<double> exact = try_exact(setup);

  os << kCsvHeader << "\n";
  os << "checkpoint,estimator,log10_estimate,estimate,abs_error_vs_exact,wall_ms\n";
  const std::size_t rows = out.traces[kinds.front()].rows.size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (EstimatorKind k : kinds) {
      const CheckpointRow& row = out.traces[k].rows[i];
      const double est = logspace::to_linear(row.log_estimate);
      os << row.n << "," << estimator_name(k) << "," << fmt_log10(row.log_estimate) << ","
         << fmt_real(est) << ",";
      if (exact) os << fmt_real(std::abs(est - logspace::to_linear(*exact)));
      os << "," << (config.timings ? fmt_ms(row.wall_ms) : "") << "\n";
    }
  }
}

void cmd_variance_study(const RunConfig& config, std::ostream& os) {
  config.validate();
  if (config.replicates < 2)
    throw ConfigError("--replicates must be at least 2 for a variance study");
  const EstimateSetup setup = setup_from(config);
  const std::vector<EstimatorKind> kinds = canonical(config.estimators);

  os << kCsvHeader << "\n";
  os << "estimator,replicates,samples,mean,variance,std_error\n";
  for (EstimatorKind k : kinds) {
    // Replicate r uses stream r; streams are independent by construction, so
    // replicates can run concurrently and are reduced in stream order.
    oracle::ReplicateStats stats = oracle::empirical_variance(
        [&](std::uint64_t stream) {
          return run_single_estimate(setup, k, config.samples, config.seed, stream);
        },
        config.replicates, config.threads);
    os << estimator_name(k) << "," << config.replicates << "," << config.samples << ","
       << fmt_real(stats.mean) << "," << fmt_real(stats.variance) << ","
       << fmt_real(stats.std_error) << "\n";
  }
}

void cmd_info(const RunConfig& config, std::ostream& os) {
  if (config.network_path.empty()) throw ConfigError("a network file is required");
  const EstimateSetup setup = setup_from(config);

  os << kCsvHeader << "\n";
  os << "key,value\n";
  os << "n," << setup.net.num_vars() << "\n";
  os << "evidence," << setup.evidence.size() << "\n";
  os << "max_domain," << setup.net.max_cardinality() << "\n";
  os << "induced_width," << setup.contexts.width() << "\n";
  for (int v : setup.tree.preorder) {
    os << "context," << v << ",";
    const auto& ctx = setup.contexts.context[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < ctx.size(); ++i) os << (i ? " " : "") << ctx[i];
    os << "\n";
  }
}

void cmd_exact(const RunConfig& config, ExactMethod method, std::ostream& os) {
  if (config.network_path.empty()) throw ConfigError("a network file is required");
  const EstimateSetup setup = setup_from(config);
  const double log_pe = method == ExactMethod::enumeration
                            ? oracle::exact_pe_enumeration(setup.net, setup.evidence)
                            : oracle::exact_pe_ao_search(setup.net, setup.evidence,
                                                         setup.tree, setup.contexts);
  os << kCsvHeader << "\n";
  os << "method,log10_pe,pe\n";
  os << (method == ExactMethod::enumeration ? "enum" : "aosearch") << ","
     << fmt_log10(log_pe) << "," << fmt_real(logspace::to_linear(log_pe)) << "\n";
}

}  // namespace aois
