#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "anisorec/kernels.hpp"

namespace anisorec::kernels {

#ifdef ANISOREC_HAVE_AVX2
namespace avx2 {
void gemv(const double*, const double*, std::size_t, std::size_t, std::size_t, const double*, const double*,
          double*, double*);
void gemv_adjoint(const double*, const double*, std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, double*);
void gemv_fused(const double*, const double*, std::size_t, std::size_t, std::size_t, const FusedRhs*, std::size_t,
                RowMap, void*);
void soft_threshold(double*, std::size_t, double);
double abs_sum(const double*, std::size_t);
} // namespace avx2

namespace {
constexpr Table kAvx2{Isa::Avx2,           "avx2-fma",           avx2::gemv,   avx2::gemv_adjoint,
                      avx2::gemv_fused,    avx2::soft_threshold, avx2::abs_sum};

bool cpu_has_avx2_fma() noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
} // namespace

const Table* avx2_table() noexcept {
  static const bool ok = cpu_has_avx2_fma();
  return ok ? &kAvx2 : nullptr;
}
#else
const Table* avx2_table() noexcept { return nullptr; }
#endif

bool available(Isa isa) noexcept { return isa == Isa::Scalar || avx2_table() != nullptr; }

const Table& table_for(Isa isa) {
  if (isa == Isa::Scalar) return scalar_table();
  if (const Table* t = avx2_table()) return *t;
  throw std::runtime_error("AVX2/FMA kernels are not available on this build or CPU");
}

const Table& active() noexcept {
  static const Table& chosen = []() -> const Table& {
    const char* force = std::getenv("ANISOREC_KERNELS");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return scalar_table();
    if (const Table* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

} // namespace anisorec::kernels
