#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "anisorec/indexsets.hpp"
#include "anisorec/sensing.hpp"
#include "anisorec/sobolev.hpp"
#include "anisorec/srlasso.hpp"

namespace anisorec {

/// The nondecreasing, unbounded growth function u(m) that trades index-set size for rate.
class GrowthFunction {
public:
  enum class Kind { LogLog, Log, Constant, Table };

  static GrowthFunction log_log() { return GrowthFunction(Kind::LogLog); }
  static GrowthFunction log() { return GrowthFunction(Kind::Log); }
  static GrowthFunction constant(double value);
  /// Step function: u(m) = value of the last breakpoint with threshold <= m. Breakpoints must
  /// be sorted by threshold with nondecreasing values; below the first threshold u = first value.
  static GrowthFunction table(std::vector<std::pair<double, double>> breakpoints);

  /// "loglog", "log", "const:V", "table:m1=u1;m2=u2"
  static GrowthFunction parse(const std::string& spec);
  [[nodiscard]] std::string label() const;

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  /// LogLog: max(1, ln ln m); Log: ln(m+1); Constant: v; Table: step lookup. Requires m >= 1.
  [[nodiscard]] double operator()(double m) const;

private:
  explicit GrowthFunction(Kind k) : kind_(k) {}
  Kind kind_;
  double value_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

struct RecoveryConfig {
  /// Failure probability the schedule is tuned for.
  double epsilon = 0.5;
  GrowthFunction u = GrowthFunction::log_log();
  /// Stand-in for the unquantified universal constant in the sparsity formula.
  double c_prime = 1.0;
  /// Largest admissible |Lambda|; larger orders are shrunk to fit and flagged.
  std::size_t max_index_set_size = 4096;
  SolverConfig solver;

  /// Throws PreconditionError on out-of-range fields.
  void validate() const;
};

void to_json(nlohmann::json& j, const RecoveryConfig& c);
/// Missing keys keep the defaults of `base`.
[[nodiscard]] RecoveryConfig recovery_config_from_json(const nlohmann::json& j, RecoveryConfig base = {});

struct RecoveryPlan {
  std::size_t m = 0;
  int d = 0;
  double u = 1.0;
  std::size_t s = 1;
  /// Hyperbolic-cross order actually used.
  std::uint64_t r = 1;
  /// ceil(s^u) before capping.
  double r_uncapped = 1.0;
  double lambda = 0.0;
  IndexSet lambda_set;
  std::size_t n = 0;
  double m_tilde = 0.0;
  bool capped = false;
};

void to_json(nlohmann::json& j, const RecoveryPlan& p);

[[nodiscard]] double u_value(const RecoveryConfig& cfg, double m);

/// m / (log^3(m) u(m) + log(1/epsilon)), natural logs. Requires m >= 2.
[[nodiscard]] double m_tilde(double m, const RecoveryConfig& cfg);

/// Sparsity s = max(floor(m / (c' (log^2(2m) (log 2 + u log m + (d-1) log(1 + u log m)) + log(1/eps)))), 1),
/// clamped to s <= m.
[[nodiscard]] std::size_t sparsity_level(std::size_t m, int d, const RecoveryConfig& cfg);

/// Full parameter schedule for a budget of m samples in dimension d.
[[nodiscard]] RecoveryPlan plan(std::size_t m, int d, const RecoveryConfig& cfg);

struct Reconstruction {
  PeriodicFunction function;
  SolverResult solver;
};

/// Build b = values / sqrt(m) and the scaled operator on plan.lambda_set, solve the SR-LASSO
/// with plan.lambda, and return f# = sum_n (2 pi)^{d/2} z#_n phi_n.
[[nodiscard]] Reconstruction reconstruct(const SampleSet& samples, std::span<const Complex> values,
                                         const RecoveryPlan& plan, const RecoveryConfig& cfg);

/// Same, reusing an operator already built for (samples, plan.lambda_set, scaled).
[[nodiscard]] Reconstruction reconstruct(const MeasurementOperator& op, std::span<const Complex> values,
                                         const RecoveryPlan& plan, const RecoveryConfig& cfg);

/// reconstruct() for several value vectors sampled at the same points, solved together.
/// Results match one-at-a-time calls exactly.
[[nodiscard]] std::vector<Reconstruction> reconstruct_batch(const MeasurementOperator& op,
                                                            std::span<const std::vector<Complex>> values,
                                                            const RecoveryPlan& plan, const RecoveryConfig& cfg);

/// Constant-free error rate in the effective budget:
/// mixed (log^{p-1}(m~)/m~)^h, sum m~^{-g}. Requires m~ > 0, and m~ > 1 when p > 1.
[[nodiscard]] double theoretical_rate(double m_tilde, const SmoothnessClass& cls);

} // namespace anisorec
