#include "anisorec/linear_map.hpp"

#include "anisorec/error.hpp"

namespace anisorec {

void LinearMap::apply_fused(std::span<const Complex> z, const RowFn& f, std::span<Complex> az, std::span<Complex> v,
                            std::span<Complex> x) const {
  if (az.size() != rows() || v.size() != rows()) throw DimensionMismatch("apply_fused: row buffers have wrong length");
  apply(z, az);
  for (std::size_t i = 0; i < az.size(); ++i) v[i] = f(i, az[i]);
  adjoint(v, x);
}

void LinearMap::apply_fused_batch(std::span<const std::span<const Complex>> z, const BatchRowFn& f,
                                  std::span<const std::span<Complex>> az, std::span<const std::span<Complex>> v,
                                  std::span<const std::span<Complex>> x) const {
  const std::size_t nr = z.size();
  if (az.size() != nr || v.size() != nr || x.size() != nr) throw DimensionMismatch("apply_fused_batch: batch sizes differ");
  for (std::size_t r = 0; r < nr; ++r) {
    if (az[r].size() != rows() || v[r].size() != rows()) throw DimensionMismatch("apply_fused_batch: row buffers have wrong length");
    apply(z[r], az[r]);
  }
  std::vector<Complex> in(nr), out(nr);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t r = 0; r < nr; ++r) in[r] = az[r][i];
    f(i, 0, in, out);
    for (std::size_t r = 0; r < nr; ++r) v[r][i] = out[r];
  }
  for (std::size_t r = 0; r < nr; ++r) adjoint(v[r], x[r]);
}

ExplicitMatrix::ExplicitMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw DimensionMismatch("ExplicitMatrix: data length is not rows * cols");
}

void ExplicitMatrix::apply(std::span<const Complex> z, std::span<Complex> out) const {
  if (z.size() != cols_ || out.size() != rows_) throw DimensionMismatch("ExplicitMatrix::apply: shape mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    Complex acc{};
    for (std::size_t k = 0; k < cols_; ++k) acc += data_[i * cols_ + k] * z[k];
    out[i] = acc;
  }
}

void ExplicitMatrix::adjoint(std::span<const Complex> w, std::span<Complex> out) const {
  if (w.size() != rows_ || out.size() != cols_) throw DimensionMismatch("ExplicitMatrix::adjoint: shape mismatch");
  for (std::size_t k = 0; k < cols_; ++k) {
    Complex acc{};
    for (std::size_t i = 0; i < rows_; ++i) acc += std::conj(data_[i * cols_ + k]) * w[i];
    out[k] = acc;
  }
}

} // namespace anisorec
