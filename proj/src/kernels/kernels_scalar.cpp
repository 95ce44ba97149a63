#include <cmath>

#include "anisorec/kernels.hpp"

namespace anisorec::kernels {

namespace {

void gemv_scalar(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* zre, const double* zim, double* yre, double* yim) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ar = mre + i * ld;
    const double* ai = mim + i * ld;
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      sr += ar[k] * zre[k] - ai[k] * zim[k];
      si += ar[k] * zim[k] + ai[k] * zre[k];
    }
    yre[i] = sr;
    yim[i] = si;
  }
}

void gemv_adjoint_scalar(const double* mre, const double* mim, std::size_t rows, std::size_t cols,
                         std::size_t ld, const double* wre, const double* wim, double* xre, double* xim) {
  for (std::size_t k = 0; k < cols; ++k) {
    xre[k] = 0.0;
    xim[k] = 0.0;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ar = mre + i * ld;
    const double* ai = mim + i * ld;
    const double wr = wre[i];
    const double wi = wim[i];
    for (std::size_t k = 0; k < cols; ++k) {
      xre[k] += ar[k] * wr + ai[k] * wi;
      xim[k] += ar[k] * wi - ai[k] * wr;
    }
  }
}

void gemv_fused_scalar(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
                       const FusedRhs* rhs, std::size_t nrhs, RowMap map, void* ctx) {
  for (std::size_t r = 0; r < nrhs; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      rhs[r].xre[k] = 0.0;
      rhs[r].xim[k] = 0.0;
    }
  }
  double yr[kMaxRhs], yi[kMaxRhs], vr[kMaxRhs], vi[kMaxRhs];
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ar = mre + i * ld;
    const double* ai = mim + i * ld;
    for (std::size_t r = 0; r < nrhs; ++r) {
      const FusedRhs& h = rhs[r];
      if (h.support == nullptr) {
        gemv_scalar(ar, ai, 1, cols, ld, h.zre, h.zim, yr + r, yi + r);
        continue;
      }
      double sr = 0.0;
      double si = 0.0;
      for (std::size_t j = 0; j < h.nnz; ++j) {
        const std::uint32_t k = h.support[j];
        sr += ar[k] * h.zre[j] - ai[k] * h.zim[j];
        si += ar[k] * h.zim[j] + ai[k] * h.zre[j];
      }
      yr[r] = sr;
      yi[r] = si;
    }
    map(ctx, i, yr, yi, vr, vi);
    for (std::size_t r = 0; r < nrhs; ++r) {
      double* xr = rhs[r].xre;
      double* xi = rhs[r].xim;
      for (std::size_t k = 0; k < cols; ++k) {
        xr[k] += ar[k] * vr[r] + ai[k] * vi[r];
        xi[k] += ar[k] * vi[r] - ai[k] * vr[r];
      }
    }
  }
}

void soft_threshold_scalar(double* z, std::size_t n, double t) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    const double mag = std::sqrt(re * re + im * im);
    const double f = mag > t ? 1.0 - t / mag : 0.0;
    z[2 * i] = re * f;
    z[2 * i + 1] = im * f;
  }
}

double abs_sum_scalar(const double* z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1]);
  return acc;
}

constexpr Table kScalar{Isa::Scalar, "scalar", gemv_scalar, gemv_adjoint_scalar, gemv_fused_scalar,
                        soft_threshold_scalar,
                        abs_sum_scalar};

} // namespace

const Table& scalar_table() noexcept { return kScalar; }

} // namespace anisorec::kernels
