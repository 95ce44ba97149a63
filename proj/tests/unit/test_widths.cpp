#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "anisorec/error.hpp"
#include "anisorec/widths.hpp"
#include "oracles.hpp"

using namespace anisorec;

TEST_CASE("spectrum examples") {
  const auto a = weight_spectrum(AnisotropyMixed({1}), 5);
  const std::vector<double> ea = {1, 0.5, 0.5, 1.0 / 3, 1.0 / 3};
  REQUIRE(a.sorted.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(a.sorted[i] == doctest::Approx(ea[i]));
  const auto b = weight_spectrum(AnisotropySum({1, 1}), 5);
  const std::vector<double> eb = {1, 0.5, 0.5, 0.5, 0.5};
  for (std::size_t i = 0; i < 5; ++i) CHECK(b.sorted[i] == doctest::Approx(eb[i]));
  const auto c = weight_spectrum(AnisotropyMixed({1, 1}), 1);
  CHECK(c.sorted == std::vector<double>{1.0});
  CHECK(c.enumerated > 2);
  CHECK_THROWS_AS((void)weight_spectrum(AnisotropyMixed({1}), 0), PreconditionError);
  CHECK_THROWS_AS((void)weight_spectrum(AnisotropyMixed({1, 1}), 1000, 100), CapExceeded);
}

TEST_CASE("spectrum against box enumeration") {
  const std::vector<SmoothnessClass> classes = {AnisotropyMixed({1, 1}), AnisotropyMixed({1, 2.5}),
                                                AnisotropySum({2, 2}), AnisotropySum({1, 3}),
                                                AnisotropyMixed({1, 1, 2})};
  for (const auto& cls : classes) {
    const auto spec = weight_spectrum(cls, 200);
    // doubling the radius must not change the prefix; weight <= 2T forces |n_j| <= 2T
    std::vector<double> all;
    const int d = static_cast<int>(class_dim(cls));
    const int radius = static_cast<int>(2 * spec.threshold);
    oracle::for_each_in_box(d, radius, [&](const std::vector<int>& n) {
      const double w = class_weight(n, cls);
      if (w <= 2 * spec.threshold) all.push_back(1.0 / w);
    });
    std::sort(all.begin(), all.end(), std::greater<>());
    REQUIRE(all.size() >= 200);
    for (std::size_t i = 0; i < 200; ++i) REQUIRE(spec.sorted[i] == doctest::Approx(all[i]).epsilon(1e-14));
    REQUIRE(std::is_sorted(spec.sorted.begin(), spec.sorted.end(), std::greater<>()));
    REQUIRE(spec.enumerated > 400);
  }
}

TEST_CASE("sandwich") {
  const auto a = weight_spectrum(AnisotropyMixed({1}), 5);
  const auto w = width_sandwich(a, 1);
  CHECK(w.lower == 0.5);
  CHECK(w.upper == 0.5);
  CHECK(width_sandwich(a, 0).upper == 1.0);
  CHECK(width_sandwich(a, 2).lower == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS((void)width_sandwich(a, 3), PreconditionError);
  const auto s = weight_spectrum(AnisotropySum({1, 2}), 301);
  for (std::size_t m = 0; m <= 150; ++m) REQUIRE(width_sandwich(s, m).lower <= width_sandwich(s, m).upper);
}

TEST_CASE("rates") {
  const double e = std::exp(1.0);
  CHECK(width_rate(AnisotropyMixed({1, 1}), e) == doctest::Approx(1 / e));
  CHECK(width_rate(AnisotropySum({1, 1}), 100) == doctest::Approx(0.1));
  CHECK(width_rate(AnisotropyMixed({2, 2}), e) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS((void)width_rate(AnisotropySum({1}), 1.0), PreconditionError);
}

TEST_CASE("d = 2 mixed band") {
  const AnisotropyMixed a({1, 1});
  const auto spec = weight_spectrum(a, 2 * 4096 + 1);
  double lo = 1e300, hi = 0;
  for (std::size_t m = 8; m <= 4096; m *= 2) {
    const double q = width_sandwich(spec, m).upper / width_rate(a, static_cast<double>(m));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi / lo <= 10.0);
}

TEST_CASE("lowest-weight support") {
  const AnisotropyMixed a({1, 1});
  const auto s = smallest_weight_support(a, 9);
  // weights 1; 2 x4; 3 x4 -> K = 9 is exactly the ball of weight <= 3
  CHECK(s.size() == 9);
  const auto t = smallest_weight_support(a, 6);
  CHECK(t.size() == 9);  // ties at weight 3 kept
  CHECK(smallest_weight_support(a, 1).size() == 1);
  const auto spec = weight_spectrum(AnisotropySum({2, 2}), 1000);
  const auto sup = smallest_weight_support(AnisotropySum({2, 2}), 1000);
  CHECK(sup.size() >= 1000);
  for (std::size_t i = 0; i < sup.size(); ++i) REQUIRE(1.0 / class_weight(sup[i], AnisotropySum({2, 2})) >= spec.sorted.back() * (1 - 1e-12));
}

TEST_CASE("spectrum JSON") {
  const auto s = weight_spectrum(AnisotropySum({2, 2}), 3);
  const nlohmann::json j = s;
  CHECK(j.at("class") == "sum:2,2");
  CHECK(j.at("sorted").size() == 3);
}
