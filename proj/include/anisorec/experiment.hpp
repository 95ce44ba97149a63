#pragma once

// Experiment drivers behind the command-line tool. Every driver is a pure function of its
// resolved configuration: the same config produces the same bytes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anisorec/recovery.hpp"
#include "anisorec/sobolev.hpp"

namespace anisorec::experiment {

inline constexpr const char* kArtifact = "anisorec";
inline constexpr const char* kVersion = "0.1.0";

/// Test function fed to recover / rate-sweep.
struct TestFunction {
  /// "extremal": coefficients weight^{-(1+decay_margin)} on the support_size lowest-weight
  ///   frequencies of the class, unit Sobolev norm;
  /// "sparse": `sparsity` unit-modulus modes drawn from the hyperbolic cross of the plan;
  /// "zero".
  std::string kind = "extremal";
  std::size_t support_size = 1000;
  double decay_margin = 0.5;
  std::size_t sparsity = 1;
};

struct ExperimentConfig {
  int d = 2;
  std::vector<std::string> classes = {"mixed:1,1", "mixed:1,2", "sum:2,2"};
  std::vector<std::size_t> m_grid = {64, 128, 256, 512, 1024, 2048};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  RecoveryConfig recovery;
  TestFunction function;

  // count
  double r = 3.0;
  /// "hc" or a class label
  std::string count_kind = "hc";
  bool positive_only = false;

  int workers = 1;
  bool strict = false;

  /// Throws PreconditionError on anything unusable for `command`.
  void validate(const std::string& command) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Missing keys keep the defaults of `base`.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// A CSV table with a '#'-prefixed JSON metadata line on top and '#'-prefixed JSON summary
/// lines at the bottom.
struct Report {
  nlohmann::json metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<nlohmann::json> summary;
  /// Cells where the solver hit max_iters.
  std::size_t nonconverged = 0;
};

void write_report(std::ostream& os, const Report& r);

/// Shared header: artifact, version, command, resolved config, PRNG identity, kernel variant.
[[nodiscard]] nlohmann::json metadata(const std::string& command, const ExperimentConfig& c);

[[nodiscard]] Report run_count(const ExperimentConfig& c);
/// First class, first m, first seed.
[[nodiscard]] Report run_recover(const ExperimentConfig& c);
[[nodiscard]] Report run_rate_sweep(const ExperimentConfig& c);
/// m_grid holds the width indices m; one table per class.
[[nodiscard]] Report run_widths(const ExperimentConfig& c);

/// Least-squares slope of log y against log x.
[[nodiscard]] double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Shortest round-trip decimal form, so CSV cells are reproducible across runs.
[[nodiscard]] std::string fmt(double v);

} // namespace anisorec::experiment
