// Compiled with -mavx2 -mfma. Only reached through avx2_table() after a CPUID check, and
// kept free of standard-library inline code so nothing AVX2-encoded leaks into shared COMDATs.

#include <immintrin.h>

#include "anisorec/kernels.hpp"

namespace anisorec::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

void gemv(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
          const double* zre, const double* zim, double* yre, double* yim) {
  const std::size_t vec_end = cols & ~std::size_t{7};
  for (std::size_t i = 0; i < rows; ++i) {
    const double* ar = mre + i * ld;
    const double* ai = mim + i * ld;
    __m256d sr0 = _mm256_setzero_pd();
    __m256d si0 = _mm256_setzero_pd();
    __m256d sr1 = _mm256_setzero_pd();
    __m256d si1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k < vec_end; k += 8) {
      const __m256d a0 = _mm256_loadu_pd(ar + k);
      const __m256d b0 = _mm256_loadu_pd(ai + k);
      const __m256d x0 = _mm256_loadu_pd(zre + k);
      const __m256d y0 = _mm256_loadu_pd(zim + k);
      sr0 = _mm256_fmadd_pd(a0, x0, sr0);
      sr0 = _mm256_fnmadd_pd(b0, y0, sr0);
      si0 = _mm256_fmadd_pd(a0, y0, si0);
      si0 = _mm256_fmadd_pd(b0, x0, si0);
      const __m256d a1 = _mm256_loadu_pd(ar + k + 4);
      const __m256d b1 = _mm256_loadu_pd(ai + k + 4);
      const __m256d x1 = _mm256_loadu_pd(zre + k + 4);
      const __m256d y1 = _mm256_loadu_pd(zim + k + 4);
      sr1 = _mm256_fmadd_pd(a1, x1, sr1);
      sr1 = _mm256_fnmadd_pd(b1, y1, sr1);
      si1 = _mm256_fmadd_pd(a1, y1, si1);
      si1 = _mm256_fmadd_pd(b1, x1, si1);
    }
    double sr = hsum(_mm256_add_pd(sr0, sr1));
    double si = hsum(_mm256_add_pd(si0, si1));
    for (; k < cols; ++k) {
      sr += ar[k] * zre[k] - ai[k] * zim[k];
      si += ar[k] * zim[k] + ai[k] * zre[k];
    }
    yre[i] = sr;
    yim[i] = si;
  }
}

namespace {

// x += conj(rows i..i+3)^T w
inline void accumulate4(const double* mre, const double* mim, std::size_t cols, std::size_t ld, const double* wre,
                        const double* wim, double* xre, double* xim) {
  const double* r0 = mre;
  const double* j0 = mim;
  const double* r1 = r0 + ld;
  const double* j1 = j0 + ld;
  const double* r2 = r1 + ld;
  const double* j2 = j1 + ld;
  const double* r3 = r2 + ld;
  const double* j3 = j2 + ld;
  const __m256d wr0 = _mm256_set1_pd(wre[0]);
  const __m256d wi0 = _mm256_set1_pd(wim[0]);
  const __m256d wr1 = _mm256_set1_pd(wre[1]);
  const __m256d wi1 = _mm256_set1_pd(wim[1]);
  const __m256d wr2 = _mm256_set1_pd(wre[2]);
  const __m256d wi2 = _mm256_set1_pd(wim[2]);
  const __m256d wr3 = _mm256_set1_pd(wre[3]);
  const __m256d wi3 = _mm256_set1_pd(wim[3]);
  const std::size_t vec_end = cols & ~std::size_t{3};
  std::size_t k = 0;
  for (; k < vec_end; k += 4) {
    __m256d xr = _mm256_loadu_pd(xre + k);
    __m256d xi = _mm256_loadu_pd(xim + k);
    __m256d a = _mm256_loadu_pd(r0 + k);
    __m256d b = _mm256_loadu_pd(j0 + k);
    xr = _mm256_fmadd_pd(a, wr0, xr);
    xr = _mm256_fmadd_pd(b, wi0, xr);
    xi = _mm256_fmadd_pd(a, wi0, xi);
    xi = _mm256_fnmadd_pd(b, wr0, xi);
    a = _mm256_loadu_pd(r1 + k);
    b = _mm256_loadu_pd(j1 + k);
    xr = _mm256_fmadd_pd(a, wr1, xr);
    xr = _mm256_fmadd_pd(b, wi1, xr);
    xi = _mm256_fmadd_pd(a, wi1, xi);
    xi = _mm256_fnmadd_pd(b, wr1, xi);
    a = _mm256_loadu_pd(r2 + k);
    b = _mm256_loadu_pd(j2 + k);
    xr = _mm256_fmadd_pd(a, wr2, xr);
    xr = _mm256_fmadd_pd(b, wi2, xr);
    xi = _mm256_fmadd_pd(a, wi2, xi);
    xi = _mm256_fnmadd_pd(b, wr2, xi);
    a = _mm256_loadu_pd(r3 + k);
    b = _mm256_loadu_pd(j3 + k);
    xr = _mm256_fmadd_pd(a, wr3, xr);
    xr = _mm256_fmadd_pd(b, wi3, xr);
    xi = _mm256_fmadd_pd(a, wi3, xi);
    xi = _mm256_fnmadd_pd(b, wr3, xi);
    _mm256_storeu_pd(xre + k, xr);
    _mm256_storeu_pd(xim + k, xi);
  }
  for (; k < cols; ++k) {
    for (std::size_t r = 0; r < 4; ++r) {
      const double ar = mre[r * ld + k];
      const double ai = mim[r * ld + k];
      xre[k] += ar * wre[r] + ai * wim[r];
      xim[k] += ar * wim[r] - ai * wre[r];
    }
  }
}

inline void accumulate1(const double* ar, const double* ai, std::size_t cols, double w_re, double w_im, double* xre,
                        double* xim) {
  const __m256d wr = _mm256_set1_pd(w_re);
  const __m256d wi = _mm256_set1_pd(w_im);
  const std::size_t vec_end = cols & ~std::size_t{3};
  std::size_t k = 0;
  for (; k < vec_end; k += 4) {
    const __m256d a = _mm256_loadu_pd(ar + k);
    const __m256d b = _mm256_loadu_pd(ai + k);
    __m256d xr = _mm256_loadu_pd(xre + k);
    __m256d xi = _mm256_loadu_pd(xim + k);
    xr = _mm256_fmadd_pd(a, wr, xr);
    xr = _mm256_fmadd_pd(b, wi, xr);
    xi = _mm256_fmadd_pd(a, wi, xi);
    xi = _mm256_fnmadd_pd(b, wr, xi);
    _mm256_storeu_pd(xre + k, xr);
    _mm256_storeu_pd(xim + k, xi);
  }
  for (; k < cols; ++k) {
    xre[k] += ar[k] * w_re + ai[k] * w_im;
    xim[k] += ar[k] * w_im - ai[k] * w_re;
  }
}

} // namespace

// Four rows per sweep over x so the accumulator vector is streamed a quarter as often.
void gemv_adjoint(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
                  const double* wre, const double* wim, double* xre, double* xim) {
  for (std::size_t k = 0; k < cols; ++k) {
    xre[k] = 0.0;
    xim[k] = 0.0;
  }
  std::size_t i = 0;
  for (; i + 4 <= rows; i += 4) accumulate4(mre + i * ld, mim + i * ld, cols, ld, wre + i, wim + i, xre, xim);
  for (; i < rows; ++i) accumulate1(mre + i * ld, mim + i * ld, cols, wre[i], wim[i], xre, xim);
}

namespace {

// Forward product of one row with a z given by its nonzeros.
double sparse_dot_re_im(const double* ar, const double* ai, const FusedRhs& h, double* im_out) {
  double sr = 0.0;
  double si = 0.0;
  for (std::size_t j = 0; j < h.nnz; ++j) {
    const std::uint32_t k = h.support[j];
    sr += ar[k] * h.zre[j] - ai[k] * h.zim[j];
    si += ar[k] * h.zim[j] + ai[k] * h.zre[j];
  }
  *im_out = si;
  return sr;
}

} // namespace

// Four rows at a time: their dot products for every right-hand side, the callback, then the
// adjoint sweeps while the rows are still in L2. The matrix comes from memory once per call.
void gemv_fused(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
                const FusedRhs* rhs, std::size_t nrhs, RowMap map, void* ctx) {
  for (std::size_t r = 0; r < nrhs; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      rhs[r].xre[k] = 0.0;
      rhs[r].xim[k] = 0.0;
    }
  }
  // [row][rhs]
  double yre[4][kMaxRhs], yim[4][kMaxRhs], vre[4][kMaxRhs], vim[4][kMaxRhs];
  for (std::size_t i = 0; i < rows; i += 4) {
    const std::size_t nb = rows - i < 4 ? rows - i : 4;
    for (std::size_t r = 0; r < nrhs; ++r) {
      const FusedRhs& h = rhs[r];
      if (h.support != nullptr) {
        for (std::size_t q = 0; q < nb; ++q) {
          yre[q][r] = sparse_dot_re_im(mre + (i + q) * ld, mim + (i + q) * ld, h, &yim[q][r]);
        }
        continue;
      }
      double yr[4], yi[4];
      gemv(mre + i * ld, mim + i * ld, nb, cols, ld, h.zre, h.zim, yr, yi);
      for (std::size_t q = 0; q < nb; ++q) {
        yre[q][r] = yr[q];
        yim[q][r] = yi[q];
      }
    }
    for (std::size_t q = 0; q < nb; ++q) map(ctx, i + q, yre[q], yim[q], vre[q], vim[q]);
    for (std::size_t r = 0; r < nrhs; ++r) {
      if (nb == 4) {
        const double wr[4] = {vre[0][r], vre[1][r], vre[2][r], vre[3][r]};
        const double wi[4] = {vim[0][r], vim[1][r], vim[2][r], vim[3][r]};
        accumulate4(mre + i * ld, mim + i * ld, cols, ld, wr, wi, rhs[r].xre, rhs[r].xim);
      } else {
        for (std::size_t q = 0; q < nb; ++q) {
          accumulate1(mre + (i + q) * ld, mim + (i + q) * ld, cols, vre[q][r], vim[q][r], rhs[r].xre, rhs[r].xim);
        }
      }
    }
  }
}

void soft_threshold(double* z, std::size_t n, double t) {
  const __m256d thr = _mm256_set1_pd(t);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  // Two complex values per register: (re0, im0, re1, im1).
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(z + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    const __m256d mag = _mm256_sqrt_pd(_mm256_add_pd(sq, _mm256_permute_pd(sq, 0b0101)));
    const __m256d keep = _mm256_cmp_pd(mag, thr, _CMP_GT_OQ);
    const __m256d f = _mm256_sub_pd(one, _mm256_div_pd(thr, mag));
    _mm256_storeu_pd(z + 2 * i, _mm256_mul_pd(v, _mm256_blendv_pd(zero, f, keep)));
  }
  for (; i < n; ++i) {
    const double re = z[2 * i];
    const double im = z[2 * i + 1];
    const double mag = __builtin_sqrt(re * re + im * im);
    const double f = mag > t ? 1.0 - t / mag : 0.0;
    z[2 * i] = re * f;
    z[2 * i + 1] = im * f;
  }
}

double abs_sum(const double* z, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(z + 2 * i);
    const __m256d sq = _mm256_mul_pd(v, v);
    // Lanes 0 and 2 carry |z|^2 after the pairwise add; halve to avoid counting twice.
    const __m256d mag = _mm256_sqrt_pd(_mm256_add_pd(sq, _mm256_permute_pd(sq, 0b0101)));
    acc = _mm256_add_pd(acc, mag);
  }
  double total = 0.5 * hsum(acc);
  for (; i < n; ++i) total += __builtin_sqrt(z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1]);
  return total;
}

} // namespace anisorec::kernels::avx2
