#include "anisorec/indexsets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "anisorec/error.hpp"

namespace anisorec {

namespace {

void validate_positive(std::span<const double> v, const char* what) {
  detail::require(!v.empty(), std::string(what) + ": dimension must be at least 1");
  for (double x : v) {
    detail::require(std::isfinite(x) && x > 0.0, std::string(what) + ": entries must be finite and > 0");
  }
}

void check_dim(int d, std::size_t expected, const char* what) {
  detail::require(d >= 1, std::string(what) + ": d must be >= 1");
  if (static_cast<std::size_t>(d) != expected) {
    throw DimensionMismatch(std::string(what) + ": d does not match the anisotropy length");
  }
}

// Product budget recursion for prod_j (1+|n_j|) <= budget over the first `d` coordinates.
std::uint64_t cross_count(int d, std::uint64_t budget) {
  if (budget == 0) return 0;
  if (d == 1) return 2 * budget - 1;
  std::uint64_t total = 0;
  for (std::uint64_t k = 0; k + 1 <= budget; ++k) {
    const std::uint64_t slice = cross_count(d - 1, budget / (k + 1));
    total += (k == 0 ? 1 : 2) * slice;
  }
  return total;
}

void cross_enumerate(int d, int j, std::uint64_t budget, std::vector<int>& current,
                     std::vector<int>& out) {
  if (j == d) {
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (std::uint64_t k = 0; k + 1 <= budget; ++k) {
    const std::uint64_t rest = budget / (k + 1);
    const int v = static_cast<int>(k);
    current[j] = v;
    cross_enumerate(d, j + 1, rest, current, out);
    if (k != 0) {
      current[j] = -v;
      cross_enumerate(d, j + 1, rest, current, out);
    }
  }
}

// Largest k >= 0 with pred(k) true, given pred monotone decreasing in k and an initial guess.
template <class Pred>
long long last_true(long long guess, Pred pred) {
  long long k = std::max<long long>(guess, -1);
  while (k >= 0 && !pred(k)) --k;
  while (pred(k + 1)) ++k;
  return k;
}

// Number of k >= 0 (signed copies when !positive_only) with prod * (1+k)^alpha < r.
std::uint64_t mixed_line_count(double prod, double r, double alpha, bool positive_only) {
  if (!(prod < r)) return 0;
  const double guess = std::pow(r / prod, 1.0 / alpha) - 1.0;
  const long long g = guess > 1e15 ? static_cast<long long>(1e15) : static_cast<long long>(guess);
  const long long k = last_true(g, [&](long long kk) {
    return prod * std::pow(1.0 + static_cast<double>(kk), alpha) < r;
  });
  const auto kk = static_cast<std::uint64_t>(k);
  return positive_only ? kk + 1 : 2 * kk + 1;
}

std::uint64_t mixed_count_rec(std::span<const double> alpha, std::size_t j, double prod, double r,
                              bool positive_only) {
  if (j + 1 == alpha.size()) return mixed_line_count(prod, r, alpha[j], positive_only);
  std::uint64_t total = 0;
  for (std::uint64_t k = 0;; ++k) {
    const double next = prod * std::pow(1.0 + static_cast<double>(k), alpha[j]);
    if (!(next < r)) break;
    total += (k == 0 || positive_only ? 1 : 2) * mixed_count_rec(alpha, j + 1, next, r, positive_only);
  }
  return total;
}

// Number of k in Z with acc + |k|^beta < r.
std::uint64_t sum_line_count(double acc, double r, double beta) {
  if (!(acc < r)) return 0;
  const double guess = std::pow(r - acc, 1.0 / beta);
  const long long g = guess > 1e15 ? static_cast<long long>(1e15) : static_cast<long long>(guess);
  const long long k = last_true(g, [&](long long kk) {
    return acc + std::pow(static_cast<double>(kk), beta) < r;
  });
  return 2 * static_cast<std::uint64_t>(k) + 1;
}

std::uint64_t sum_count_rec(std::span<const double> beta, std::size_t j, double acc, double r) {
  if (j + 1 == beta.size()) return sum_line_count(acc, r, beta[j]);
  std::uint64_t total = 0;
  for (std::uint64_t k = 0;; ++k) {
    const double next = acc + std::pow(static_cast<double>(k), beta[j]);
    if (!(next < r)) break;
    total += (k == 0 ? 1 : 2) * sum_count_rec(beta, j + 1, next, r);
  }
  return total;
}

// Generic sublevel enumeration: `step(j, k, acc)` folds coordinate j's contribution into acc,
// and `keep(acc)` says whether the partial weight is still within the threshold. Both weight
// families are monotone in |n_j|, so the first failing k ends the coordinate's range.
template <class Step, class Keep>
void sublevel_enumerate(std::size_t d, std::size_t j, double acc, std::vector<int>& current,
                        std::vector<MultiIndex>& out, std::size_t cap, const Step& step,
                        const Keep& keep) {
  if (j == d) {
    if (out.size() >= cap) throw CapExceeded("sublevel enumeration exceeds cap of " + std::to_string(cap));
    out.emplace_back(current);
    return;
  }
  for (int k = 0;; ++k) {
    const double next = step(j, k, acc);
    if (!keep(next)) break;
    current[j] = k;
    sublevel_enumerate(d, j + 1, next, current, out, cap, step, keep);
    if (k != 0) {
      current[j] = -k;
      sublevel_enumerate(d, j + 1, next, current, out, cap, step, keep);
    }
  }
}

} // namespace

AnisotropyMixed::AnisotropyMixed(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  validate_positive(alpha_, "AnisotropyMixed");
  h_ = *std::min_element(alpha_.begin(), alpha_.end());
  p_ = static_cast<int>(std::count(alpha_.begin(), alpha_.end(), h_));
}

AnisotropySum::AnisotropySum(std::vector<double> beta) : beta_(std::move(beta)) {
  validate_positive(beta_, "AnisotropySum");
  double inv = 0.0;
  for (double b : beta_) inv += 1.0 / b;
  g_ = 1.0 / inv;
}

double cross_weight(std::span<const int> n) noexcept {
  double w = 1.0;
  for (int v : n) w *= 1.0 + std::abs(static_cast<double>(v));
  return w;
}

double mixed_weight(std::span<const int> n, const AnisotropyMixed& a) {
  if (n.size() != a.dim()) throw DimensionMismatch("mixed_weight: index and alpha lengths differ");
  double w = 1.0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    w *= std::pow(1.0 + std::abs(static_cast<double>(n[j])), a.alpha()[j]);
  }
  return w;
}

double sum_weight(std::span<const int> n, const AnisotropySum& b) {
  if (n.size() != b.dim()) throw DimensionMismatch("sum_weight: index and beta lengths differ");
  double w = 1.0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    w += std::pow(std::abs(static_cast<double>(n[j])), b.beta()[j]);
  }
  return w;
}

bool CanonicalLess::operator()(std::span<const int> a, std::span<const int> b) const noexcept {
  const double wa = cross_weight(a);
  const double wb = cross_weight(b);
  if (wa != wb) return wa < wb;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

IndexSet IndexSet::from_indices(int dim, std::vector<MultiIndex> indices) {
  detail::require(dim >= 1, "IndexSet: dim must be >= 1");
  for (const auto& n : indices) {
    if (n.dim() != static_cast<std::size_t>(dim)) throw DimensionMismatch("IndexSet: index length differs from dim");
  }
  std::sort(indices.begin(), indices.end(), CanonicalLess{});
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  IndexSet s(dim);
  s.flat_.reserve(indices.size() * static_cast<std::size_t>(dim));
  for (const auto& n : indices) s.flat_.insert(s.flat_.end(), n.entries.begin(), n.entries.end());
  return s;
}

MultiIndex IndexSet::index(std::size_t i) const {
  const auto v = (*this)[i];
  return MultiIndex(std::vector<int>(v.begin(), v.end()));
}

std::size_t IndexSet::find(std::span<const int> n) const {
  if (n.size() != static_cast<std::size_t>(dim_)) return size();
  std::size_t lo = 0;
  std::size_t hi = size();
  const CanonicalLess less;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (less((*this)[mid], n)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size()) {
    const auto v = (*this)[lo];
    if (std::equal(v.begin(), v.end(), n.begin())) return lo;
  }
  return size();
}

std::vector<int> IndexSet::max_abs_per_coordinate() const {
  std::vector<int> out(static_cast<std::size_t>(dim_), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto v = (*this)[i];
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::max(out[j], std::abs(v[j]));
  }
  return out;
}

std::uint64_t hyperbolic_cross_size(int d, double r) {
  detail::require(d >= 1, "hyperbolic_cross: d must be >= 1");
  detail::require(r >= 0.0 && !std::isnan(r), "hyperbolic_cross: r must be >= 0");
  if (r < 1.0) return 0;
  detail::require(r < 1e15, "hyperbolic_cross: order too large");
  return cross_count(d, static_cast<std::uint64_t>(std::floor(r)));
}

IndexSet hyperbolic_cross(int d, double r, std::size_t cap) {
  const std::uint64_t n = hyperbolic_cross_size(d, r);
  if (n > cap) {
    throw CapExceeded("hyperbolic cross of order " + std::to_string(r) + " in d=" + std::to_string(d) +
                      " has " + std::to_string(n) + " elements, cap is " + std::to_string(cap));
  }
  std::vector<int> flat;
  if (n > 0) {
    flat.reserve(n * static_cast<std::size_t>(d));
    std::vector<int> current(static_cast<std::size_t>(d), 0);
    cross_enumerate(d, 0, static_cast<std::uint64_t>(std::floor(r)), current, flat);
  }
  std::vector<MultiIndex> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < flat.size(); i += static_cast<std::size_t>(d)) {
    rows.emplace_back(std::vector<int>(flat.begin() + static_cast<std::ptrdiff_t>(i),
                                       flat.begin() + static_cast<std::ptrdiff_t>(i + static_cast<std::size_t>(d))));
  }
  if (rows.empty()) return IndexSet(d);
  return IndexSet::from_indices(d, std::move(rows));
}

std::uint64_t largest_order_within(int d, std::size_t cap) {
  detail::require(d >= 1, "largest_order_within: d must be >= 1");
  if (cap < 1) return 0;
  std::uint64_t lo = 1;  // |HC(d,1)| = 1 <= cap
  std::uint64_t hi = 2;
  while (hyperbolic_cross_size(d, static_cast<double>(hi)) <= cap) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (hyperbolic_cross_size(d, static_cast<double>(mid)) <= cap) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::uint64_t count_mixed(int d, double r, const AnisotropyMixed& a, bool positive_only) {
  check_dim(d, a.dim(), "count_mixed");
  detail::require(!std::isnan(r), "count_mixed: r must not be NaN");
  return mixed_count_rec(a.alpha(), 0, 1.0, r, positive_only);
}

std::uint64_t count_sum(int d, double r, const AnisotropySum& b) {
  check_dim(d, b.dim(), "count_sum");
  detail::require(!std::isnan(r), "count_sum: r must not be NaN");
  return sum_count_rec(b.beta(), 0, 0.0, r);
}

std::vector<MultiIndex> enumerate_mixed(const AnisotropyMixed& a, double threshold, std::size_t cap) {
  std::vector<MultiIndex> out;
  std::vector<int> current(a.dim(), 0);
  const auto alpha = a.alpha();
  sublevel_enumerate(
      a.dim(), 0, 1.0, current, out, cap,
      [&](std::size_t j, int k, double acc) { return acc * std::pow(1.0 + k, alpha[j]); },
      [&](double w) { return w <= threshold; });
  return out;
}

std::vector<MultiIndex> enumerate_sum(const AnisotropySum& b, double threshold, std::size_t cap) {
  std::vector<MultiIndex> out;
  std::vector<int> current(b.dim(), 0);
  const auto beta = b.beta();
  sublevel_enumerate(
      b.dim(), 0, 1.0, current, out, cap,
      [&](std::size_t j, int k, double acc) { return acc + std::pow(static_cast<double>(k), beta[j]); },
      [&](double w) { return w <= threshold; });
  return out;
}

void to_json(nlohmann::json& j, const MultiIndex& n) { j = n.entries; }

void to_json(nlohmann::json& j, const IndexSet& s) {
  j = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto v = s[i];
    j.push_back(std::vector<int>(v.begin(), v.end()));
  }
}

IndexSet index_set_from_json(int dim, const nlohmann::json& j) {
  detail::require(j.is_array(), "index set JSON must be an array of integer arrays");
  std::vector<MultiIndex> rows;
  rows.reserve(j.size());
  for (const auto& row : j) rows.emplace_back(row.get<std::vector<int>>());
  if (rows.empty()) return IndexSet(dim);
  return IndexSet::from_indices(dim, std::move(rows));
}

} // namespace anisorec
