#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace anisorec {

using Complex = std::complex<double>;

/// Complex linear map C^cols -> C^rows with its adjoint.
class LinearMap {
public:
  virtual ~LinearMap() = default;

  [[nodiscard]] virtual std::size_t rows() const = 0;
  [[nodiscard]] virtual std::size_t cols() const = 0;
  virtual void apply(std::span<const Complex> z, std::span<Complex> out) const = 0;
  virtual void adjoint(std::span<const Complex> w, std::span<Complex> out) const = 0;

  /// Row map for apply_fused: receives (row, (A z)_row) and returns v_row.
  using RowFn = std::function<Complex(std::size_t, Complex)>;

  /// az = A z, v_i = f(i, az_i) in row order, x = A^H v. Implementations may do this in one
  /// pass over the operator; the default is apply followed by adjoint.
  virtual void apply_fused(std::span<const Complex> z, const RowFn& f, std::span<Complex> az, std::span<Complex> v,
                           std::span<Complex> x) const;

  /// Row map for apply_fused_batch: f(row, first, in, out) gets in[j] = (A z_{first+j})_row and
  /// writes out[j] = v_{first+j,row}. Implementations may split the batch into chunks.
  using BatchRowFn = std::function<void(std::size_t, std::size_t, std::span<const Complex>, std::span<Complex>)>;

  /// apply_fused for several vectors at once; az[r], v[r], x[r] belong to z[r]. Each result is
  /// what apply_fused would give for that vector alone.
  virtual void apply_fused_batch(std::span<const std::span<const Complex>> z, const BatchRowFn& f,
                                 std::span<const std::span<Complex>> az, std::span<const std::span<Complex>> v,
                                 std::span<const std::span<Complex>> x) const;

  /// A cheap guaranteed upper bound on the spectral norm, when one is known.
  [[nodiscard]] virtual std::optional<double> norm_upper_bound() const { return std::nullopt; }
};

/// Row-major dense matrix; small problems and test oracles.
class ExplicitMatrix final : public LinearMap {
public:
  ExplicitMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

  [[nodiscard]] std::size_t rows() const override { return rows_; }
  [[nodiscard]] std::size_t cols() const override { return cols_; }
  [[nodiscard]] Complex operator()(std::size_t i, std::size_t k) const { return data_[i * cols_ + k]; }

  void apply(std::span<const Complex> z, std::span<Complex> out) const override;
  void adjoint(std::span<const Complex> w, std::span<Complex> out) const override;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
};

} // namespace anisorec
