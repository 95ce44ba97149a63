#pragma once

// Data-parallel inner loops of the measurement operator and the solver.
//
// Every kernel exists as a portable scalar reference and, when the compiler supports it,
// an AVX2/FMA variant. The variant is picked once at runtime from CPUID; setting
// ANISOREC_KERNELS=scalar in the environment forces the reference path. The two variants
// differ only in summation order, and tests/test_kernels.cpp holds them to that.
//
// Matrices are row-major with split real/imaginary planes: entry (i, k) lives at
// re[i*ld + k], im[i*ld + k]. Vectors passed to the matrix kernels are split the same way.

#include <cstddef>
#include <cstdint>

namespace anisorec::kernels {

enum class Isa { Scalar, Avx2 };

/// Most right-hand sides one fused call takes.
inline constexpr std::size_t kMaxRhs = 4;

/// Per-row callback of the fused product: sees (M z_r)_i for each right-hand side r and
/// writes v_{r,i}. The four arrays have nrhs entries.
using RowMap = void (*)(void* ctx, std::size_t i, const double* yre, const double* yim, double* vre, double* vim);

/// One right-hand side of the fused product. With support == nullptr, z is dense (length cols).
/// Otherwise z holds only the nonzero entries, z[j] belonging to column support[j], and the
/// forward product visits just those columns.
struct FusedRhs {
  const double* zre;
  const double* zim;
  const std::uint32_t* support;
  std::size_t nnz;
  double* xre;
  double* xim;
};

struct Table {
  Isa isa;
  const char* name;

  /// y = M z
  void (*gemv)(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
               const double* zre, const double* zim, double* yre, double* yim);

  /// x = M^H w
  void (*gemv_adjoint)(const double* mre, const double* mim, std::size_t rows, std::size_t cols,
                       std::size_t ld, const double* wre, const double* wim, double* xre, double* xim);

  /// One pass over M for 1 <= nrhs <= kMaxRhs vectors: y_{r,i} = (M z_r)_i, v_{:,i} = map(i, y_{:,i}),
  /// x_r = M^H v_r. Rows are visited in order. Each right-hand side gets exactly the arithmetic
  /// it would get alone, so batching never changes results.
  void (*gemv_fused)(const double* mre, const double* mim, std::size_t rows, std::size_t cols, std::size_t ld,
                     const FusedRhs* rhs, std::size_t nrhs, RowMap map, void* ctx);

  /// In place on n interleaved complex values: z <- z * max(0, 1 - t/|z|), exact zero when |z| <= t.
  void (*soft_threshold)(double* z, std::size_t n, double t);

  /// sum_i |z_i| over n interleaved complex values.
  double (*abs_sum)(const double* z, std::size_t n);
};

[[nodiscard]] const Table& scalar_table() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks the instructions.
[[nodiscard]] const Table* avx2_table() noexcept;

[[nodiscard]] bool available(Isa isa) noexcept;
[[nodiscard]] const Table& table_for(Isa isa);

/// The table selected for this process (first call decides; thread-safe).
[[nodiscard]] const Table& active() noexcept;

} // namespace anisorec::kernels
