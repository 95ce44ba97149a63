#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace anisorec {

/// Exponent of an l^q quantity: a positive real or infinity. Infinity is a distinct state,
/// not a large float.
class Exponent {
public:
  /// Throws PreconditionError unless q > 0 and finite.
  explicit Exponent(double q);
  static Exponent infinity() noexcept { return Exponent(); }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  /// Finite value; PreconditionError when infinite.
  [[nodiscard]] double value() const;
  /// 1/q, with 1/inf = 0.
  [[nodiscard]] double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / q_; }

private:
  Exponent() noexcept : q_(0.0), infinite_(true) {}
  double q_;
  bool infinite_;
};

/// Magnitudes |c_i| sorted non-increasing. Ties keep source order (the canonical index
/// order of whatever produced the sequence).
struct Rearrangement {
  std::vector<double> magnitudes;
  /// Source position of each magnitude.
  std::vector<std::size_t> order;

  [[nodiscard]] std::size_t size() const noexcept { return magnitudes.size(); }
};

[[nodiscard]] Rearrangement rearrange(std::span<const std::complex<double>> c);
[[nodiscard]] Rearrangement rearrange(std::span<const double> c);

[[nodiscard]] double lq_norm(std::span<const std::complex<double>> c, Exponent q);
[[nodiscard]] double lq_norm(std::span<const double> c, Exponent q);

/// sup_i c*_i i^{1/p} (max{1, log i})^{-a/p} over the finite rearrangement.
[[nodiscard]] double weak_lorentz_norm(std::span<const std::complex<double>> c, double p, double a);
[[nodiscard]] double weak_lorentz_norm(std::span<const double> c, double p, double a);

/// l^q norm of what remains after removing the s largest magnitudes.
[[nodiscard]] double best_s_term_error(std::span<const std::complex<double>> c, std::size_t s, Exponent q);
[[nodiscard]] double best_s_term_error(std::span<const double> c, std::size_t s, Exponent q);

/// Same quantity from an existing rearrangement; O(size) with no re-sort.
[[nodiscard]] double tail_norm(const Rearrangement& r, std::size_t s, Exponent q);

/// All sigma_s for s = 0..size in one pass (q finite or infinite).
[[nodiscard]] std::vector<double> best_s_term_profile(const Rearrangement& r, Exponent q);

/// norm_value * max{1,s}^{1/q - 1/p} * max{1, log max{1,s}}^{a/p}.
/// `s` is real-valued so the bound can be evaluated between integers.
/// Throws PreconditionError unless 0 < p < q and a >= 0.
[[nodiscard]] double stechkin_rhs(double s, double p, Exponent q, double a, double norm_value);

/// Smallest C with sigma_s(c)_q <= C * stechkin_rhs(s, p, q, a, 1) for every s < size.
[[nodiscard]] double stechkin_converse_constant(std::span<const double> c, double p, Exponent q, double a);

/// 2^{1/p + 1/q}: the factor by which the weak-Lorentz norm may exceed that constant.
[[nodiscard]] double stechkin_converse_factor(double p, Exponent q);

} // namespace anisorec
