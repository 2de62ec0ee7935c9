#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aois/estimators.hpp"
#include "aois/runner.hpp"

namespace aois {

// Resolved command-line configuration shared by the subcommands. CSV output
// is deterministic for a fixed config and seed; wall-clock timings are only
// emitted when `timings` is set, since they would break byte-identical
// reruns.
struct RunConfig {
  std::string network_path;
  std::string evidence_path;  // empty -> no evidence
  ProposalSpec proposal;
  OrderSpec order;
  std::vector<EstimatorKind> estimators = {EstimatorKind::is, EstimatorKind::aotree,
                                           EstimatorKind::aograph};
  std::uint64_t samples = 1000;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> checkpoints;  // empty -> {samples}
  int replicates = 0;
  int threads = 1;
  bool timings = false;

  void validate() const;  // throws ConfigError
};

inline constexpr const char* kCsvHeader = "# aois-csv v1";

// estimator,n,log10_estimate,estimate,wall_ms
void cmd_estimate(const RunConfig& config, std::ostream& os);

// checkpoint,estimator,log10_estimate,estimate,abs_error_vs_exact,wall_ms
// (the exact column is filled when an oracle fits in the resource bounds)
void cmd_compare(const RunConfig& config, std::ostream& os);

// estimator,replicates,samples,mean,variance,std_error
void cmd_variance_study(const RunConfig& config, std::ostream& os);

// Structure report: n, evidence count, max domain size, induced width and
// per-variable contexts.
void cmd_info(const RunConfig& config, std::ostream& os);

// method,log10_pe,pe
enum class ExactMethod { enumeration, aosearch };
void cmd_exact(const RunConfig& config, ExactMethod method, std::ostream& os);

}  // namespace aois
