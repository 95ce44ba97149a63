#include "anisorec/widths.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "anisorec/error.hpp"

namespace anisorec {

namespace {

std::vector<MultiIndex> enumerate(const SmoothnessClass& cls, double t, std::size_t cap) {
  if (const auto* a = std::get_if<AnisotropyMixed>(&cls)) return enumerate_mixed(*a, t, cap);
  return enumerate_sum(std::get<AnisotropySum>(cls), t, cap);
}

} // namespace

WeightSpectrum weight_spectrum(const SmoothnessClass& cls, std::size_t k, std::size_t cap) {
  detail::require(k >= 1, "weight_spectrum: K must be >= 1");
  WeightSpectrum out{cls, {}, 1.0, 0};
  std::vector<MultiIndex> idx;
  double t = 1.0;
  do {
    t *= 2.0;
    idx = enumerate(cls, t, cap);
  } while (idx.size() <= 2 * k);
  out.threshold = t;
  out.enumerated = idx.size();

  std::vector<double> w;
  w.reserve(idx.size());
  for (const auto& n : idx) w.push_back(1.0 / class_weight(n.view(), cls));
  std::partial_sort(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), w.end(), std::greater<>());
  w.resize(k);
  out.sorted = std::move(w);
  return out;
}

WidthBounds width_sandwich(const WeightSpectrum& spec, std::size_t m) {
  detail::require(2 * m + 1 <= spec.sorted.size(), "width_sandwich: spectrum shorter than 2m+1");
  return {spec.sorted[2 * m], spec.sorted[m]};
}

double width_rate(const SmoothnessClass& cls, double m) {
  detail::require(m > 1.0 && std::isfinite(m), "width_rate: m must be > 1");
  if (const auto* a = std::get_if<AnisotropyMixed>(&cls)) {
    return std::pow(std::pow(std::log(m), a->p() - 1) / m, a->h());
  }
  return std::pow(m, -std::get<AnisotropySum>(cls).g());
}

IndexSet smallest_weight_support(const SmoothnessClass& cls, std::size_t k, std::size_t cap) {
  const WeightSpectrum spec = weight_spectrum(cls, k, cap);
  // Reciprocal round trip is not exact; compare weights with a relative slack far below any gap.
  const double wk = 1.0 / spec.sorted.back();
  auto idx = enumerate(cls, wk * (1.0 + 1e-12), cap);
  return IndexSet::from_indices(static_cast<int>(class_dim(cls)), std::move(idx));
}

void to_json(nlohmann::json& j, const WeightSpectrum& s) {
  j = {{"class", class_label(s.cls)}, {"K", s.sorted.size()}, {"threshold", s.threshold},
       {"enumerated", s.enumerated}, {"sorted", s.sorted}};
}

} // namespace anisorec
