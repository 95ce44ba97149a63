#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "anisorec/linear_map.hpp"

namespace anisorec {

struct SolverConfig {
  int max_iters = 5000;
  /// Relative duality gap, or relative iterate and objective change, below which we stop.
  double tol = 1e-9;
  /// Steps satisfy tau * sigma = step_scale^2 / L^2 with L the operator-norm estimate.
  double step_scale = 0.9;
  int power_iters = 30;
  /// Rebalance tau/sigma from the primal and dual residuals (product held fixed).
  bool adaptive_steps = true;
  /// Keep the per-iteration incumbent objective in SolverResult::history.
  bool record_history = false;
  /// When non-empty, stream "iter,objective,residual_norm,gap" CSV here.
  std::string trace_path;
};

struct SolverResult {
  std::vector<Complex> z_sharp;
  double objective = 0.0;
  int iters_used = 0;
  bool converged = false;
  /// Primal objective minus the best feasible dual value seen.
  double gap = 0.0;
  double norm_estimate = 0.0;
  std::vector<double> history;
};

/// lambda ||z||_1 + ||A z - b||_2
[[nodiscard]] double objective(const LinearMap& a, std::span<const Complex> b, double lambda,
                               std::span<const Complex> z);

/// Estimate of ||A||_2 from power iteration on A^* A with a fixed pseudo-random start.
[[nodiscard]] double estimate_operator_norm(const LinearMap& a, int iterations);

/// Square-root LASSO, min_z lambda ||z||_1 + ||A z - b||_2, by primal-dual splitting:
/// the dual step projects onto the unit ball after the shift by b, the primal step is
/// complex soft-thresholding at lambda * tau. Starts from z = 0 and returns the iterate with
/// the lowest objective seen. Reaching max_iters sets converged = false; it never throws for
/// that. Throws NonFiniteInput on NaN/inf data and PreconditionError for lambda <= 0.
[[nodiscard]] SolverResult solve(const LinearMap& a, std::span<const Complex> b, double lambda,
                                 const SolverConfig& config = {});

/// solve() for several data vectors on one operator. Iterations share passes over the
/// operator; every result equals what solve() returns for that vector alone. Tracing is not
/// available here.
[[nodiscard]] std::vector<SolverResult> solve_batch(const LinearMap& a, std::span<const std::vector<Complex>> bs,
                                                    std::span<const double> lambdas, const SolverConfig& config = {});

} // namespace anisorec
