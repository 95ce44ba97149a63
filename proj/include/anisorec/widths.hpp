#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "anisorec/indexsets.hpp"
#include "anisorec/sobolev.hpp"

namespace anisorec {

/// The K largest reciprocal weights 1/weight(n) over Z^d, non-increasing.
///
/// Found by enumerating {weight(n) <= T} for T = 2, 4, 8, ... until more than 2K indices
/// are inside. Every index left out has weight > T, hence reciprocal < 1/T <= sorted[K-1],
/// so the prefix is complete.
struct WeightSpectrum {
  SmoothnessClass cls;
  std::vector<double> sorted;
  /// Final enumeration threshold T.
  double threshold = 0.0;
  /// |{weight(n) <= T}|
  std::size_t enumerated = 0;
};

[[nodiscard]] WeightSpectrum weight_spectrum(const SmoothnessClass& cls, std::size_t k,
                                             std::size_t cap = kDefaultIndexCap);

struct WidthBounds {
  double lower;
  double upper;
};

/// (w*_{2m+1}, w*_{m+1}), 1-based. Requires 2m+1 <= K.
[[nodiscard]] WidthBounds width_sandwich(const WeightSpectrum& spec, std::size_t m);

/// mixed ((log m)^{p-1} / m)^h, sum m^{-g}. Requires m > 1.
[[nodiscard]] double width_rate(const SmoothnessClass& cls, double m);

void to_json(nlohmann::json& j, const WeightSpectrum& s);

} // namespace anisorec

namespace anisorec {

/// Every n with weight(n) <= w_K, where w_K is the K-th smallest weight over Z^d: the K
/// lowest-weight frequencies plus any ties at the boundary. Canonical order.
[[nodiscard]] IndexSet smallest_weight_support(const SmoothnessClass& cls, std::size_t k,
                                               std::size_t cap = kDefaultIndexCap);

} // namespace anisorec
