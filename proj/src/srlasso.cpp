#include "anisorec/srlasso.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "anisorec/error.hpp"
#include "anisorec/kernels.hpp"
#include "anisorec/rng.hpp"

namespace anisorec {

namespace {

void require_finite(std::span<const Complex> v, const char* what) {
  for (const auto& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NonFiniteInput(std::string(what) + ": non-finite entry");
  }
}

double l2(std::span<const Complex> v) {
  double acc = 0.0;
  for (const auto& c : v) acc += std::norm(c);
  return std::sqrt(acc);
}

double residual_norm(std::span<const Complex> az, std::span<const Complex> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < az.size(); ++i) acc += std::norm(az[i] - b[i]);
  return std::sqrt(acc);
}

double l1(std::span<const Complex> z) {
  return kernels::active().abs_sum(reinterpret_cast<const double*>(z.data()), z.size());
}

} // namespace

double objective(const LinearMap& a, std::span<const Complex> b, double lambda, std::span<const Complex> z) {
  if (b.size() != a.rows() || z.size() != a.cols()) throw DimensionMismatch("objective: dimensions do not match the operator");
  detail::require(lambda > 0.0 && std::isfinite(lambda), "objective: lambda must be > 0");
  std::vector<Complex> az(a.rows());
  a.apply(z, az);
  return lambda * l1(z) + residual_norm(az, b);
}

double estimate_operator_norm(const LinearMap& a, int iterations) {
  detail::require(iterations >= 1, "estimate_operator_norm: need at least one iteration");
  const CounterRng rng(0, streams::kSolverInit);
  std::vector<Complex> v(a.cols());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = {rng.uniform_at(2 * k) - 0.5, rng.uniform_at(2 * k + 1) - 0.5};
  double nv = l2(v);
  if (nv == 0.0) return 0.0;
  for (auto& c : v) c /= nv;
  std::vector<Complex> w(a.rows());
  double sq = 0.0;
  for (int it = 0; it < iterations; ++it) {
    a.apply(v, w);
    a.adjoint(w, v);
    sq = l2(v);
    if (sq == 0.0) return 0.0;
    for (auto& c : v) c /= sq;
  }
  return std::sqrt(sq);
}

namespace {

void check_inputs(const LinearMap& a, std::span<const Complex> b, double lambda, const SolverConfig& config) {
  if (b.size() != a.rows()) throw DimensionMismatch("solve: b length differs from the operator row count");
  if (!std::isfinite(lambda)) throw NonFiniteInput("solve: lambda is not finite");
  detail::require(lambda > 0.0, "solve: lambda must be > 0");
  require_finite(b, "solve");
  detail::require(config.max_iters >= 1, "solve: max_iters must be >= 1");
  detail::require(config.tol > 0.0, "solve: tol must be > 0");
  detail::require(config.step_scale > 0.0 && config.step_scale < 1.0, "solve: step_scale must lie in (0, 1)");
}

double step_norm(const LinearMap& a, const SolverConfig& config) {
  double norm = 1.05 * estimate_operator_norm(a, config.power_iters);
  if (const auto bound = a.norm_upper_bound()) norm = std::min(norm, *bound);
  return norm;
}

// One primal-dual run. An iteration is begin(), then row() for every row inside a fused pass
// that also fills az and g = A^H v, then finish(). Several runs on one operator can share
// the pass.
class Run {
public:
  Run(std::span<const Complex> b, double lambda, double norm, std::size_t n, const SolverConfig& config)
      : b_(b), lambda_(lambda), cfg_(config), kt_(kernels::active()), m_(b.size()), n_(n),
        tau_(config.step_scale / norm), sigma_(config.step_scale / norm), z_(n), z_prev_(n), g_(n), g_prev_(n),
        y_(m_), y_prev_(m_), az_(m_), az_prev_(m_) {
    res_.z_sharp.assign(n, Complex{});
    res_.norm_estimate = norm;
    res_.objective = l2(b);
    prev_obj_ = res_.objective;
    if (!config.trace_path.empty()) {
      trace_ = std::make_unique<std::ofstream>(config.trace_path);
      *trace_ << "iter,objective,residual_norm,gap\n";
      trace_->precision(17);
    }
  }

  [[nodiscard]] bool done() const noexcept { return done_; }

  void begin() {
    z_prev_.swap(z_);
    az_prev_.swap(az_);
    for (std::size_t k = 0; k < n_; ++k) z_[k] = z_prev_[k] - tau_ * g_[k];
    kt_.soft_threshold(reinterpret_cast<double*>(z_.data()), n_, tau_ * lambda_);
    y_prev_.swap(y_);
    g_prev_.swap(g_);
    vnorm_sq_ = 0.0;
  }

  // Dual step before the ball projection. The projection is a global rescale, so it
  // commutes with A^H and is applied in finish().
  Complex row(std::size_t i, Complex azi) {
    const Complex vi = y_prev_[i] + sigma_ * (2.0 * azi - az_prev_[i] - b_[i]);
    vnorm_sq_ += std::norm(vi);
    return vi;
  }

  std::span<const Complex> z() const noexcept { return z_; }
  std::span<Complex> az() noexcept { return az_; }
  std::span<Complex> y() noexcept { return y_; }
  std::span<Complex> g() noexcept { return g_; }

  void finish() {
    ++it_;
    if (vnorm_sq_ > 1.0) {
      const double s = 1.0 / std::sqrt(vnorm_sq_);
      for (auto& c : y_) c *= s;
      for (auto& c : g_) c *= s;
    }

    const double rnorm = residual_norm(az_, b_);
    const double obj = lambda_ * kt_.abs_sum(reinterpret_cast<const double*>(z_.data()), n_) + rnorm;

    double ginf = 0.0;
    for (const auto& c : g_) ginf = std::max(ginf, std::abs(c));
    double yb = 0.0;
    for (std::size_t i = 0; i < m_; ++i) yb += (std::conj(y_[i]) * b_[i]).real();
    const double feas = ginf > lambda_ ? lambda_ / ginf : 1.0;
    best_dual_ = std::max(best_dual_, -feas * yb);

    if (obj < res_.objective) {
      res_.objective = obj;
      res_.z_sharp = z_;
    }
    res_.gap = std::max(0.0, res_.objective - best_dual_);
    res_.iters_used = it_;
    if (cfg_.record_history) res_.history.push_back(res_.objective);
    if (trace_) *trace_ << it_ << ',' << obj << ',' << rnorm << ',' << res_.gap << '\n';

    // Iterate change covers the dual variable too: while z sits at 0 early on, y still moves.
    const double tiny = std::numeric_limits<double>::min();
    double dz = 0.0;
    for (std::size_t k = 0; k < n_; ++k) dz += std::norm(z_[k] - z_prev_[k]);
    dz = std::sqrt(dz) / std::max(l2(z_), tiny);
    double dy = 0.0;
    for (std::size_t i = 0; i < m_; ++i) dy += std::norm(y_[i] - y_prev_[i]);
    dy = std::sqrt(dy) / std::max(l2(y_), tiny);
    const double dobj = std::abs(obj - prev_obj_) / std::max(obj, tiny);
    prev_obj_ = obj;
    const bool stalled = it_ > 1 && dz <= cfg_.tol && dy <= cfg_.tol && dobj <= cfg_.tol;
    if (res_.gap <= cfg_.tol * std::max(res_.objective, tiny) || stalled) {
      res_.converged = true;
      done_ = true;
      return;
    }
    if (it_ >= cfg_.max_iters) {
      done_ = true;
      return;
    }

    if (cfg_.adaptive_steps) {
      constexpr double kAdaptDecay = 0.95;
      constexpr double kImbalance = 1.5;
      double p = 0.0;
      for (std::size_t k = 0; k < n_; ++k) p += std::norm((z_prev_[k] - z_[k]) / tau_ - (g_prev_[k] - g_[k]));
      double d = 0.0;
      for (std::size_t i = 0; i < m_; ++i) d += std::norm((y_prev_[i] - y_[i]) / sigma_ - (az_prev_[i] - az_[i]));
      p = std::sqrt(p);
      d = std::sqrt(d);
      if (p > kImbalance * d) {
        tau_ /= 1.0 - adapt_;
        sigma_ *= 1.0 - adapt_;
        adapt_ *= kAdaptDecay;
      } else if (d > kImbalance * p) {
        tau_ *= 1.0 - adapt_;
        sigma_ /= 1.0 - adapt_;
        adapt_ *= kAdaptDecay;
      }
    }
  }

  SolverResult take() { return std::move(res_); }

private:
  std::span<const Complex> b_;
  double lambda_;
  const SolverConfig& cfg_;
  const kernels::Table& kt_;
  std::size_t m_, n_;
  double tau_, sigma_;
  double adapt_ = 0.5;
  double best_dual_ = 0.0;  // y = 0 is dual feasible with value 0
  double prev_obj_ = 0.0;
  double vnorm_sq_ = 0.0;
  int it_ = 0;
  bool done_ = false;
  std::vector<Complex> z_, z_prev_, g_, g_prev_;
  std::vector<Complex> y_, y_prev_, az_, az_prev_;
  std::unique_ptr<std::ofstream> trace_;
  SolverResult res_;
};

// Zero data or a zero operator: z = 0 is optimal.
SolverResult trivial(std::size_t n, double bnorm, double norm) {
  SolverResult res;
  res.z_sharp.assign(n, Complex{});
  res.objective = bnorm;
  res.norm_estimate = norm;
  res.converged = true;
  return res;
}

} // namespace

SolverResult solve(const LinearMap& a, std::span<const Complex> b, double lambda, const SolverConfig& config) {
  check_inputs(a, b, lambda, config);
  if (l2(b) == 0.0) return trivial(a.cols(), 0.0, 0.0);
  const double norm = step_norm(a, config);
  if (norm == 0.0) return trivial(a.cols(), l2(b), 0.0);

  Run run(b, lambda, norm, a.cols(), config);
  while (!run.done()) {
    run.begin();
    a.apply_fused(run.z(), [&](std::size_t i, Complex azi) { return run.row(i, azi); }, run.az(), run.y(), run.g());
    run.finish();
  }
  return run.take();
}

std::vector<SolverResult> solve_batch(const LinearMap& a, std::span<const std::vector<Complex>> bs,
                                      std::span<const double> lambdas, const SolverConfig& config) {
  if (bs.size() != lambdas.size()) throw DimensionMismatch("solve_batch: need one lambda per data vector");
  detail::require(config.trace_path.empty(), "solve_batch: tracing is only supported by solve");
  for (std::size_t j = 0; j < bs.size(); ++j) check_inputs(a, bs[j], lambdas[j], config);

  std::vector<SolverResult> out(bs.size());
  std::vector<std::unique_ptr<Run>> runs(bs.size());
  double norm = -1.0;  // estimated once, on first need
  for (std::size_t j = 0; j < bs.size(); ++j) {
    const double bnorm = l2(bs[j]);
    if (bnorm == 0.0) {
      out[j] = trivial(a.cols(), 0.0, 0.0);
      continue;
    }
    if (norm < 0.0) norm = step_norm(a, config);
    if (norm == 0.0) {
      out[j] = trivial(a.cols(), bnorm, 0.0);
      continue;
    }
    runs[j] = std::make_unique<Run>(bs[j], lambdas[j], norm, a.cols(), config);
  }

  std::vector<Run*> live;
  std::vector<std::span<const Complex>> z;
  std::vector<std::span<Complex>> az, y, g;
  for (;;) {
    live.clear();
    for (auto& r : runs) {
      if (r && !r->done()) live.push_back(r.get());
    }
    if (live.empty()) break;
    z.clear();
    az.clear();
    y.clear();
    g.clear();
    for (Run* r : live) {
      r->begin();
      z.push_back(r->z());
      az.push_back(r->az());
      y.push_back(r->y());
      g.push_back(r->g());
    }
    a.apply_fused_batch(
        z,
        [&](std::size_t i, std::size_t first, std::span<const Complex> in, std::span<Complex> v) {
          for (std::size_t q = 0; q < in.size(); ++q) v[q] = live[first + q]->row(i, in[q]);
        },
        az, y, g);
    for (Run* r : live) r->finish();
  }
  for (std::size_t j = 0; j < bs.size(); ++j) {
    if (runs[j]) out[j] = runs[j]->take();
  }
  return out;
}

} // namespace anisorec
