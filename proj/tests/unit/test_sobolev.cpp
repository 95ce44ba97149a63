#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "anisorec/error.hpp"
#include "anisorec/indexsets.hpp"
#include "anisorec/rng.hpp"
#include "anisorec/sobolev.hpp"

using namespace anisorec;

namespace {

PeriodicFunction single(int d, MultiIndex n, Complex c) {
  PeriodicFunction::CoeffMap m;
  m.emplace(std::move(n), c);
  return PeriodicFunction(d, std::move(m));
}

PeriodicFunction random_function(int d, std::size_t terms, std::uint64_t seed) {
  const CounterRng rng(seed, 77);
  PeriodicFunction::CoeffMap m;
  std::uint64_t ctr = 0;
  terms = std::min<std::size_t>(terms, static_cast<std::size_t>(std::pow(13, d)));
  while (m.size() < terms) {
    std::vector<int> n(static_cast<std::size_t>(d));
    for (auto& v : n) v = static_cast<int>(rng.uniform_at(ctr++) * 13.0) - 6;
    m[MultiIndex(n)] = Complex(rng.uniform_at(ctr++) - 0.5, rng.uniform_at(ctr++) - 0.5);
  }
  return PeriodicFunction(d, std::move(m));
}

} // namespace

TEST_CASE("basis normalization") {
  CHECK(basis_normalization(1) == doctest::Approx(0.3989422804014327));
  CHECK(basis_normalization(2) == doctest::Approx(1.0 / (2.0 * kPi)));
}

TEST_CASE("evaluate examples") {
  const std::vector<double> x = {1.234};
  CHECK(std::abs(evaluate(single(1, MultiIndex{0}, 1.0), x) - Complex(0.3989422804014327)) < 1e-15);
  PeriodicFunction::CoeffMap plus{{MultiIndex{1}, 1.0}, {MultiIndex{-1}, 1.0}};
  const std::vector<double> zero = {0.0};
  CHECK(std::abs(evaluate(PeriodicFunction(1, plus), zero) - Complex(2 * 0.3989422804014327)) < 1e-15);
  PeriodicFunction::CoeffMap minus{{MultiIndex{1}, 1.0}, {MultiIndex{-1}, -1.0}};
  CHECK(std::abs(evaluate(PeriodicFunction(1, minus), zero)) < 1e-15);
  CHECK_THROWS_AS((void)evaluate(PeriodicFunction(2), x), DimensionMismatch);
}

TEST_CASE("evaluate_many agrees with direct summation") {
  for (int d = 1; d <= 3; ++d) {
    const auto f = random_function(d, 40, static_cast<std::uint64_t>(d));
    const CounterRng rng(5, static_cast<std::uint64_t>(d));
    std::vector<double> pts(static_cast<std::size_t>(d) * 25);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = -kPi + 2 * kPi * rng.uniform_at(i);
    const auto many = evaluate_many(f, pts);
    for (std::size_t i = 0; i < 25; ++i) {
      const auto x = std::span<const double>(pts).subspan(i * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
      // independent oracle: straight complex exponentials
      Complex ref{};
      for (const auto& [n, c] : f.coefficients()) {
        double ph = 0.0;
        for (std::size_t j = 0; j < n.dim(); ++j) ph += n[j] * x[j];
        ref += c * std::exp(Complex(0.0, ph));
      }
      ref *= std::pow(2 * kPi, -0.5 * d);
      REQUIRE(std::abs(many[i] - ref) < 1e-12);
      REQUIRE(std::abs(evaluate(f, x) - ref) < 1e-12);
    }
  }
}

TEST_CASE("sobolev norm examples") {
  CHECK(sobolev_norm(single(2, MultiIndex{0, 0}, 1.0), AnisotropyMixed({1, 1})) == 1.0);
  CHECK(sobolev_norm(single(2, MultiIndex{1, 0}, 2.0), AnisotropyMixed({1, 2})) == doctest::Approx(4.0));
  CHECK(sobolev_norm(single(2, MultiIndex{1, 1}, 1.0), AnisotropySum({1, 1})) == doctest::Approx(3.0));
  CHECK_THROWS_AS((void)sobolev_norm(single(2, MultiIndex{1, 1}, 1.0), AnisotropySum({1})), DimensionMismatch);
}

TEST_CASE("sobolev norm tends to the l2 norm as smoothness vanishes") {
  const auto f = random_function(2, 30, 4);
  double prev = sobolev_norm(f, AnisotropyMixed({1, 1}));
  for (double a : {0.5, 0.1, 0.01, 1e-6}) {
    const double s = sobolev_norm(f, AnisotropyMixed({a, a}));
    CHECK(s <= prev);
    prev = s;
  }
  CHECK(prev == doctest::Approx(l2_norm(f)).epsilon(1e-4));
  const auto origin = single(2, MultiIndex{0, 0}, Complex(3, 4));
  CHECK(sobolev_norm(origin, AnisotropySum({2, 3})) == l2_norm(origin));
}

TEST_CASE("l2 error examples") {
  const auto f = random_function(2, 10, 1);
  CHECK(l2_error(f, f) == 0.0);
  CHECK(l2_error(single(1, MultiIndex{0}, 1.0), single(1, MultiIndex{0}, 0.0)) == 1.0);
  PeriodicFunction::CoeffMap a{{MultiIndex{0}, 3.0}, {MultiIndex{1}, 0.0}};
  PeriodicFunction::CoeffMap b{{MultiIndex{0}, 0.0}, {MultiIndex{1}, 4.0}};
  CHECK(l2_error(PeriodicFunction(1, a), PeriodicFunction(1, b)) == doctest::Approx(5.0));
  CHECK_THROWS_AS((void)l2_error(PeriodicFunction(1), PeriodicFunction(2)), DimensionMismatch);
}

TEST_CASE("Parseval: Monte Carlo mean of |f|^2 matches the coefficient norm") {
  for (int d = 1; d <= 3; ++d) {
    const auto f = random_function(d, 20 + 10 * static_cast<std::size_t>(d), 100 + static_cast<std::uint64_t>(d));
    const std::size_t npts = 100000;
    const CounterRng rng(9, static_cast<std::uint64_t>(d));
    std::vector<double> pts(npts * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = -kPi + 2 * kPi * rng.uniform_at(i);
    const auto vals = evaluate_many(f, pts);
    const double vol = std::pow(2 * kPi, d);
    double mean = 0.0, sq = 0.0;
    for (const auto& v : vals) {
      const double e = std::norm(v) * vol;
      mean += e;
      sq += e * e;
    }
    mean /= npts;
    const double se = std::sqrt((sq / npts - mean * mean) / npts);
    const double exact = std::pow(l2_norm(f), 2);
    CAPTURE(d);
    CHECK(std::abs(mean - exact) <= 3 * se);
  }
}

TEST_CASE("generate_extremal") {
  const SmoothnessClass one = AnisotropyMixed({1});
  const auto origin = generate_extremal(one, IndexSet::from_indices(1, {MultiIndex{0}}), 0.3, 99);
  REQUIRE(origin.support_size() == 1);
  CHECK(std::abs(origin.coefficient(MultiIndex{0})) == doctest::Approx(1.0));

  const SmoothnessClass cls = AnisotropyMixed({1, 1});
  const auto sup = hyperbolic_cross(2, 20);
  const auto f = generate_extremal(cls, sup, 0.5, 7);
  CHECK(std::abs(sobolev_norm(f, cls) - 1.0) < 1e-12);
  CHECK(f == generate_extremal(cls, sup, 0.5, 7));
  CHECK(!(f == generate_extremal(cls, sup, 0.5, 8)));
  for (const SmoothnessClass c : {SmoothnessClass(AnisotropyMixed({1, 2})), SmoothnessClass(AnisotropySum({2, 2})),
                                  SmoothnessClass(AnisotropySum({0.5, 3}))}) {
    for (double margin : {0.1, 0.5, 2.0}) {
      REQUIRE(std::abs(sobolev_norm(generate_extremal(c, sup, margin, 3), c) - 1.0) < 1e-10);
    }
  }
  // magnitudes decay with the weight
  const auto vals = f.values();
  for (std::size_t i = 0; i < sup.size(); ++i) {
    for (std::size_t k = 0; k < sup.size(); ++k) {
      if (cross_weight(sup[i]) < cross_weight(sup[k])) REQUIRE(std::abs(vals[i]) > std::abs(vals[k]));
    }
  }
  CHECK_THROWS_AS((void)generate_extremal(cls, IndexSet(2), 0.5, 1), PreconditionError);
  CHECK_THROWS_AS((void)generate_extremal(cls, sup, 0.0, 1), PreconditionError);
}

TEST_CASE("generate_sparse") {
  const auto sup = hyperbolic_cross(1, 3);
  const auto all = generate_sparse(sup, 5, 1);
  CHECK(all.support() == sup);
  const auto one = generate_sparse(hyperbolic_cross(2, 30), 1, 4);
  REQUIRE(one.support_size() == 1);
  CHECK(std::abs(one.values()[0]) == doctest::Approx(1.0));
  CHECK(generate_sparse(hyperbolic_cross(2, 30), 7, 11) == generate_sparse(hyperbolic_cross(2, 30), 7, 11));
  CHECK_THROWS_AS((void)generate_sparse(sup, 6, 1), PreconditionError);
  // every index gets picked for some seed: the draw is not stuck on a prefix
  const auto big = hyperbolic_cross(2, 6);
  std::vector<int> hits(big.size(), 0);
  for (std::uint64_t s = 0; s < 400; ++s) {
    const auto f = generate_sparse(big, 2, s);
    for (const auto& [n, c] : f.coefficients()) ++hits[big.find(n.view())];
  }
  CHECK(*std::min_element(hits.begin(), hits.end()) > 0);
}

TEST_CASE("mixed weight to the g power is dominated by the sum weight") {
  const auto set = hyperbolic_cross(2, 100);
  for (const auto& beta : std::vector<std::vector<double>>{{1, 1}, {1, 2}, {2, 3}}) {
    const AnisotropySum b(beta);
    const double factor = std::pow(2.0, *std::max_element(beta.begin(), beta.end()));
    for (std::size_t i = 0; i < set.size(); ++i) {
      REQUIRE(std::pow(cross_weight(set[i]), b.g()) <= factor * sum_weight(set[i], b));
    }
  }
}

TEST_CASE("class labels round trip") {
  for (const std::string s : {"mixed:1,2", "sum:2,2", "mixed:0.5", "sum:1.25,3,0.75"}) {
    CHECK(class_label(parse_class(s)) == s);
  }
  CHECK_THROWS_AS((void)parse_class("mixed"), PreconditionError);
  CHECK_THROWS_AS((void)parse_class("mixed:1,x"), PreconditionError);
  CHECK_THROWS_AS((void)parse_class("poly:1"), PreconditionError);
  CHECK_THROWS_AS((void)parse_class("sum:1,-2"), PreconditionError);
}

TEST_CASE("periodic function JSON round trip") {
  const auto f = random_function(3, 12, 8);
  const nlohmann::json j = f;
  CHECK(j.at("dim") == 3);
  CHECK(j.at("entries").size() == 12);
  CHECK(periodic_function_from_json(j) == f);
}
