#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "anisorec/indexsets.hpp"
#include "anisorec/kernels.hpp"
#include "anisorec/linear_map.hpp"
#include "anisorec/sobolev.hpp"

namespace anisorec {

/// m points on the torus [-pi, pi)^d, stored row-major.
class SampleSet {
public:
  SampleSet(int dim, std::uint64_t seed, std::vector<double> coords);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  [[nodiscard]] std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

private:
  int dim_;
  std::uint64_t seed_;
  std::vector<double> coords_;
};

/// i.i.d. uniform points; coordinate j of point i is draw i*d + j of the seed's sample stream.
[[nodiscard]] SampleSet draw_uniform_samples(std::size_t m, int d, std::uint64_t seed);

void to_json(nlohmann::json& j, const SampleSet& x);
[[nodiscard]] SampleSet sample_set_from_json(const nlohmann::json& j);

struct OperatorOptions {
  /// Materialize the matrix when rows*cols is at most this many entries.
  std::size_t dense_limit = std::size_t{1} << 24;
  /// Kernel variant; nullptr means kernels::active().
  const kernels::Table* kernels = nullptr;
};

/// The m x N sampled Fourier matrix on an index set. Entry (i, n) is
/// e^{i n.x_i} / sqrt(m) when scaled, and (2 pi)^{-d/2} times that otherwise.
class MeasurementOperator final : public LinearMap {
public:
  MeasurementOperator(SampleSet samples, IndexSet columns, bool scaled, OperatorOptions options = {});

  [[nodiscard]] std::size_t rows() const override { return samples_.size(); }
  [[nodiscard]] std::size_t cols() const override { return columns_.size(); }
  [[nodiscard]] bool scaled() const noexcept { return scaled_; }
  [[nodiscard]] bool is_dense() const noexcept { return dense_ != nullptr; }
  [[nodiscard]] const SampleSet& samples() const noexcept { return samples_; }
  [[nodiscard]] const IndexSet& columns() const noexcept { return columns_; }
  [[nodiscard]] const kernels::Table& kernel_table() const noexcept { return *kernels_; }

  [[nodiscard]] Complex entry(std::size_t i, std::size_t k) const;

  void apply(std::span<const Complex> z, std::span<Complex> out) const override;
  [[nodiscard]] std::vector<Complex> apply(std::span<const Complex> z) const;

  void adjoint(std::span<const Complex> w, std::span<Complex> out) const override;
  [[nodiscard]] std::vector<Complex> adjoint(std::span<const Complex> w) const;

  /// Single pass over the stored matrix when dense.
  void apply_fused(std::span<const Complex> z, const RowFn& f, std::span<Complex> az, std::span<Complex> v,
                   std::span<Complex> x) const override;
  void apply_fused_batch(std::span<const std::span<const Complex>> z, const BatchRowFn& f,
                         std::span<const std::span<Complex>> az, std::span<const std::span<Complex>> v,
                         std::span<const std::span<Complex>> x) const override;

  /// Frobenius bound: every entry has the same modulus.
  [[nodiscard]] std::optional<double> norm_upper_bound() const override;

  /// Long-format CSV "row,col,re,im" of every entry.
  void write_csv(std::ostream& os) const;

private:
  struct Dense {
    std::vector<double> re;
    std::vector<double> im;
  };

  double entry_scale() const noexcept;
  void fill_row_tables(std::size_t i, std::vector<Complex>& table) const;
  void apply_matrix_free(std::span<const Complex> z, std::span<Complex> out) const;
  void adjoint_matrix_free(std::span<const Complex> w, std::span<Complex> out) const;

  SampleSet samples_;
  IndexSet columns_;
  bool scaled_;
  const kernels::Table* kernels_;
  std::vector<int> kmax_;
  std::vector<std::size_t> table_offset_;
  std::shared_ptr<const Dense> dense_;
};

/// b_i = f(x_i) / sqrt(m)
[[nodiscard]] std::vector<Complex> sample_vector(const PeriodicFunction& f, const SampleSet& x);

/// v_i = (f(x_i) - f_Lambda(x_i)) / sqrt(m), where f_Lambda keeps only coefficients on Lambda.
[[nodiscard]] std::vector<Complex> truncation_error_vector(const PeriodicFunction& f, const SampleSet& x,
                                                           const IndexSet& lambda);

/// Coefficients of f restricted to `lambda`, aligned with its canonical order (zeros elsewhere).
[[nodiscard]] std::vector<Complex> restrict_coefficients(const PeriodicFunction& f, const IndexSet& lambda);

inline constexpr std::size_t kRipMaxColumns = 16;
inline constexpr std::size_t kRipMaxOrder = 6;

/// delta_s of the scaled operator by enumerating every s-column subset:
/// max over S of max(lambda_max(G_S) - 1, 1 - lambda_min(G_S)), G_S = A_S^* A_S.
/// Refuses (PreconditionError) beyond kRipMaxColumns columns or kRipMaxOrder order.
[[nodiscard]] double rip_constant_bruteforce(const MeasurementOperator& op, std::size_t s);

/// Robust null space property constants (rho, tau).
struct RnspConstants {
  double rho;
  double tau;

  /// What delta_{2s} <= 1/4 buys: rho = sqrt(2)/3, tau = 2 sqrt(5)/3.
  static RnspConstants from_rip_quarter() noexcept;
};

struct RecoveryConstants {
  double c1, c2, c3, c4;
};

[[nodiscard]] RecoveryConstants recovery_constants(RnspConstants k);

/// Largest admissible SR-LASSO weight, (1+rho)/((3+rho) tau sqrt(s)).
[[nodiscard]] double lambda_upper_limit(RnspConstants k, std::size_t s);

struct ErrorCertificate {
  double l1;
  double l2;
};

/// Right-hand sides of the l1 and l2 error bounds for an SR-LASSO minimizer, given
/// sigma_s(z*)_1 and the noise norm ||h||_2. Throws PreconditionError when lambda lies
/// outside (0, lambda_upper_limit].
[[nodiscard]] ErrorCertificate srlasso_error_certificate(RnspConstants k, double lambda, std::size_t s,
                                                         double sigma_s_l1, double noise_norm);

} // namespace anisorec
