#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "anisorec/indexsets.hpp"

namespace anisorec {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// (2 pi)^{-d/2}: the normalization of the orthonormal Fourier basis on the torus.
[[nodiscard]] double basis_normalization(int d);

using SmoothnessClass = std::variant<AnisotropyMixed, AnisotropySum>;

[[nodiscard]] std::size_t class_dim(const SmoothnessClass& cls);
/// Un-squared Sobolev weight of n for the class.
[[nodiscard]] double class_weight(std::span<const int> n, const SmoothnessClass& cls);
/// "mixed:1,2" / "sum:2,2"
[[nodiscard]] std::string class_label(const SmoothnessClass& cls);
/// Inverse of class_label.
[[nodiscard]] SmoothnessClass parse_class(const std::string& label);

/// Finitely supported trigonometric polynomial f = sum_n c_n phi_n with
/// phi_n(x) = (2 pi)^{-d/2} e^{i n.x}. Coefficients are kept in canonical index order.
class PeriodicFunction {
public:
  using CoeffMap = std::map<MultiIndex, Complex, CanonicalLess>;

  explicit PeriodicFunction(int dim);
  PeriodicFunction(int dim, CoeffMap coeffs);
  /// Coefficients aligned with `support` (same length, canonical order).
  PeriodicFunction(const IndexSet& support, std::span<const Complex> coeffs);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const CoeffMap& coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] std::size_t support_size() const noexcept { return coeffs_.size(); }
  [[nodiscard]] Complex coefficient(const MultiIndex& n) const;
  [[nodiscard]] IndexSet support() const;
  /// Coefficient values in canonical order.
  [[nodiscard]] std::vector<Complex> values() const;

  friend bool operator==(const PeriodicFunction&, const PeriodicFunction&) = default;

private:
  int dim_;
  CoeffMap coeffs_;
};

/// Direct summation at one point.
[[nodiscard]] Complex evaluate(const PeriodicFunction& f, std::span<const double> x);

/// Evaluate at many points (row-major m x d). Uses per-point exponential tables.
[[nodiscard]] std::vector<Complex> evaluate_many(const PeriodicFunction& f, std::span<const double> points);

[[nodiscard]] double sobolev_norm(const PeriodicFunction& f, const SmoothnessClass& cls);

/// ||f - g||_{L^2} via Parseval on the union of supports.
[[nodiscard]] double l2_error(const PeriodicFunction& f, const PeriodicFunction& g);
[[nodiscard]] double l2_norm(const PeriodicFunction& f);

/// Coefficients e^{i theta_n} weight(n)^{-(1+decay_margin)} with seeded phases, rescaled to
/// unit Sobolev norm in `cls`.
[[nodiscard]] PeriodicFunction generate_extremal(const SmoothnessClass& cls, const IndexSet& support,
                                                 double decay_margin, std::uint64_t seed);

/// s distinct indices drawn uniformly from `support`, unit modulus and seeded random phase.
[[nodiscard]] PeriodicFunction generate_sparse(const IndexSet& support, std::size_t s, std::uint64_t seed);

void to_json(nlohmann::json& j, const PeriodicFunction& f);
[[nodiscard]] PeriodicFunction periodic_function_from_json(const nlohmann::json& j);

} // namespace anisorec
