#include "anisorec/seqtools.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anisorec/error.hpp"

namespace anisorec {

namespace {

std::vector<double> magnitudes_of(std::span<const std::complex<double>> c) {
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](const std::complex<double>& z) { return std::abs(z); });
  return out;
}

std::vector<double> magnitudes_of(std::span<const double> c) {
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](double x) { return std::abs(x); });
  return out;
}

Rearrangement rearrange_magnitudes(std::vector<double> mags) {
  Rearrangement r;
  r.order.resize(mags.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t a, std::size_t b) { return mags[a] > mags[b]; });
  r.magnitudes.resize(mags.size());
  for (std::size_t i = 0; i < mags.size(); ++i) r.magnitudes[i] = mags[r.order[i]];
  return r;
}

// Scaled accumulation keeps large-q powers from overflowing.
double norm_of_magnitudes(std::span<const double> mags, Exponent q) {
  if (mags.empty()) return 0.0;
  const double peak = *std::max_element(mags.begin(), mags.end());
  if (q.is_infinite() || peak == 0.0) return peak;
  const double qv = q.value();
  double acc = 0.0;
  for (double m : mags) acc += std::pow(m / peak, qv);
  return peak * std::pow(acc, 1.0 / qv);
}

double weak_lorentz_of_sorted(std::span<const double> sorted, double p, double a) {
  detail::require(p > 0.0 && std::isfinite(p), "weak_lorentz_norm: p must be > 0");
  detail::require(a >= 0.0 && std::isfinite(a), "weak_lorentz_norm: a must be >= 0");
  double best = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double idx = static_cast<double>(i + 1);
    const double logf = std::max(1.0, std::log(idx));
    best = std::max(best, sorted[i] * std::pow(idx, 1.0 / p) * std::pow(logf, -a / p));
  }
  return best;
}

} // namespace

Exponent::Exponent(double q) : q_(q), infinite_(false) {
  detail::require(std::isfinite(q) && q > 0.0, "Exponent: q must be finite and > 0 (use Exponent::infinity())");
}

double Exponent::value() const {
  detail::require(!infinite_, "Exponent: value() of an infinite exponent");
  return q_;
}

Rearrangement rearrange(std::span<const std::complex<double>> c) { return rearrange_magnitudes(magnitudes_of(c)); }
Rearrangement rearrange(std::span<const double> c) { return rearrange_magnitudes(magnitudes_of(c)); }

double lq_norm(std::span<const std::complex<double>> c, Exponent q) { return norm_of_magnitudes(magnitudes_of(c), q); }
double lq_norm(std::span<const double> c, Exponent q) { return norm_of_magnitudes(magnitudes_of(c), q); }

double weak_lorentz_norm(std::span<const std::complex<double>> c, double p, double a) {
  return weak_lorentz_of_sorted(rearrange(c).magnitudes, p, a);
}

double weak_lorentz_norm(std::span<const double> c, double p, double a) {
  return weak_lorentz_of_sorted(rearrange(c).magnitudes, p, a);
}

double tail_norm(const Rearrangement& r, std::size_t s, Exponent q) {
  if (s >= r.size()) return 0.0;
  return norm_of_magnitudes(std::span<const double>(r.magnitudes).subspan(s), q);
}

double best_s_term_error(std::span<const std::complex<double>> c, std::size_t s, Exponent q) {
  return tail_norm(rearrange(c), s, q);
}

double best_s_term_error(std::span<const double> c, std::size_t s, Exponent q) {
  return tail_norm(rearrange(c), s, q);
}

std::vector<double> best_s_term_profile(const Rearrangement& r, Exponent q) {
  const std::size_t n = r.size();
  std::vector<double> out(n + 1, 0.0);
  if (q.is_infinite()) {
    for (std::size_t s = 0; s < n; ++s) out[s] = r.magnitudes[s];
    return out;
  }
  // Suffix sums from the small end so each tail is accumulated smallest-first.
  const double qv = q.value();
  double acc = 0.0;
  for (std::size_t s = n; s-- > 0;) {
    acc += std::pow(r.magnitudes[s], qv);
    out[s] = std::pow(acc, 1.0 / qv);
  }
  return out;
}

double stechkin_rhs(double s, double p, Exponent q, double a, double norm_value) {
  detail::require(s >= 0.0 && std::isfinite(s), "stechkin_rhs: s must be >= 0");
  detail::require(p > 0.0 && std::isfinite(p), "stechkin_rhs: p must be > 0");
  detail::require(q.is_infinite() || p < q.value(), "stechkin_rhs: requires p < q");
  detail::require(a >= 0.0 && std::isfinite(a), "stechkin_rhs: a must be >= 0");
  detail::require(norm_value >= 0.0, "stechkin_rhs: norm value must be >= 0");
  const double s1 = std::max(1.0, s);
  const double logf = std::max(1.0, std::log(s1));
  return norm_value * std::pow(s1, q.reciprocal() - 1.0 / p) * std::pow(logf, a / p);
}

double stechkin_converse_constant(std::span<const double> c, double p, Exponent q, double a) {
  const auto r = rearrange(c);
  const auto profile = best_s_term_profile(r, q);
  double best = 0.0;
  for (std::size_t s = 0; s < r.size(); ++s) {
    best = std::max(best, profile[s] / stechkin_rhs(static_cast<double>(s), p, q, a, 1.0));
  }
  return best;
}

double stechkin_converse_factor(double p, Exponent q) {
  detail::require(p > 0.0, "stechkin_converse_factor: p must be > 0");
  return std::pow(2.0, 1.0 / p + q.reciprocal());
}

} // namespace anisorec
