#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace anisorec {

/// Frequency n in Z^d.
struct MultiIndex {
  std::vector<int> entries;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {}
  MultiIndex(std::initializer_list<int> e) : entries(e) {}

  [[nodiscard]] std::size_t dim() const noexcept { return entries.size(); }
  [[nodiscard]] std::span<const int> view() const noexcept { return entries; }
  int operator[](std::size_t j) const { return entries[j]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Dominating-mixed smoothness exponents alpha, all strictly positive.
class AnisotropyMixed {
public:
  explicit AnisotropyMixed(std::vector<double> alpha);

  [[nodiscard]] std::size_t dim() const noexcept { return alpha_.size(); }
  [[nodiscard]] std::span<const double> alpha() const noexcept { return alpha_; }
  /// min_j alpha_j
  [[nodiscard]] double h() const noexcept { return h_; }
  /// multiplicity of the minimum
  [[nodiscard]] int p() const noexcept { return p_; }

  friend bool operator==(const AnisotropyMixed& a, const AnisotropyMixed& b) {
    return a.alpha_ == b.alpha_;
  }

private:
  std::vector<double> alpha_;
  double h_;
  int p_;
};

/// Additive (anisotropic Sobolev) smoothness exponents beta, all strictly positive.
class AnisotropySum {
public:
  explicit AnisotropySum(std::vector<double> beta);

  [[nodiscard]] std::size_t dim() const noexcept { return beta_.size(); }
  [[nodiscard]] std::span<const double> beta() const noexcept { return beta_; }
  /// (sum_j 1/beta_j)^{-1}
  [[nodiscard]] double g() const noexcept { return g_; }

  friend bool operator==(const AnisotropySum& a, const AnisotropySum& b) {
    return a.beta_ == b.beta_;
  }

private:
  std::vector<double> beta_;
  double g_;
};

/// prod_j (1+|n_j|): the weight that defines the hyperbolic cross.
[[nodiscard]] double cross_weight(std::span<const int> n) noexcept;

/// prod_j (1+|n_j|)^{alpha_j}
[[nodiscard]] double mixed_weight(std::span<const int> n, const AnisotropyMixed& a);
[[nodiscard]] inline double mixed_weight(const MultiIndex& n, const AnisotropyMixed& a) {
  return mixed_weight(n.view(), a);
}

/// 1 + sum_j |n_j|^{beta_j}
[[nodiscard]] double sum_weight(std::span<const int> n, const AnisotropySum& b);
[[nodiscard]] inline double sum_weight(const MultiIndex& n, const AnisotropySum& b) {
  return sum_weight(n.view(), b);
}

/// Canonical order: ascending cross_weight, ties broken lexicographically on entries.
struct CanonicalLess {
  bool operator()(std::span<const int> a, std::span<const int> b) const noexcept;
  bool operator()(const MultiIndex& a, const MultiIndex& b) const noexcept {
    return (*this)(a.view(), b.view());
  }
};

/// Finite, duplicate-free set of multi-indices in canonical order. Immutable once built.
class IndexSet {
public:
  IndexSet() = default;
  explicit IndexSet(int dim) : dim_(dim) {}

  /// Sorts into canonical order and removes duplicates.
  static IndexSet from_indices(int dim, std::vector<MultiIndex> indices);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept {
    return dim_ == 0 ? 0 : flat_.size() / static_cast<std::size_t>(dim_);
  }
  [[nodiscard]] bool empty() const noexcept { return flat_.empty(); }

  [[nodiscard]] std::span<const int> operator[](std::size_t i) const noexcept {
    return {flat_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  [[nodiscard]] MultiIndex index(std::size_t i) const;

  /// Position of n in canonical order, or size() if absent. O(log N).
  [[nodiscard]] std::size_t find(std::span<const int> n) const;
  [[nodiscard]] bool contains(std::span<const int> n) const { return find(n) != size(); }

  /// max_i |n_j| over the set, per coordinate.
  [[nodiscard]] std::vector<int> max_abs_per_coordinate() const;

  /// Row-major (size() x dim()) storage.
  [[nodiscard]] std::span<const int> flat() const noexcept { return flat_; }

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
  int dim_ = 0;
  std::vector<int> flat_;
};

/// Largest enumeration any index-set builder will perform unless told otherwise.
inline constexpr std::size_t kDefaultIndexCap = std::size_t{1} << 22;

/// |{n in Z^d : prod_j (1+|n_j|) <= r}| without materializing the set.
[[nodiscard]] std::uint64_t hyperbolic_cross_size(int d, double r);

/// {n in Z^d : prod_j (1+|n_j|) <= r}, canonical order. Empty when r < 1.
/// Throws CapExceeded when the cardinality would exceed `cap`.
[[nodiscard]] IndexSet hyperbolic_cross(int d, double r, std::size_t cap = kDefaultIndexCap);

/// Largest integer order whose hyperbolic cross has at most `cap` elements (0 if none).
[[nodiscard]] std::uint64_t largest_order_within(int d, std::size_t cap);

/// |{n in Z^d (Z_+^d if positive_only) : prod_j (1+|n_j|)^{alpha_j} < r}|, strict.
/// Counted by slicing one coordinate at a time; the innermost coordinate is closed-form.
[[nodiscard]] std::uint64_t count_mixed(int d, double r, const AnisotropyMixed& a,
                                        bool positive_only);

/// |{n in Z^d : sum_j |n_j|^{beta_j} < r}|, strict.
[[nodiscard]] std::uint64_t count_sum(int d, double r, const AnisotropySum& b);

/// Enumerate the sublevel sets themselves (used by the width spectra).
/// Non-strict: weight(n) <= threshold. Throws CapExceeded past `cap`.
[[nodiscard]] std::vector<MultiIndex> enumerate_mixed(const AnisotropyMixed& a, double threshold,
                                                      std::size_t cap);
[[nodiscard]] std::vector<MultiIndex> enumerate_sum(const AnisotropySum& b, double threshold,
                                                    std::size_t cap);

void to_json(nlohmann::json& j, const MultiIndex& n);
void to_json(nlohmann::json& j, const IndexSet& s);
IndexSet index_set_from_json(int dim, const nlohmann::json& j);

} // namespace anisorec
