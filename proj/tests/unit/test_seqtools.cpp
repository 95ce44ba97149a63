#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "anisorec/error.hpp"
#include "anisorec/rng.hpp"
#include "anisorec/seqtools.hpp"

using namespace anisorec;
using cd = std::complex<double>;

namespace {

/// min over supports S with |S| <= s of ||c - c|_S||_q, by trying every subset.
double exhaustive_sigma(const std::vector<double>& c, std::size_t s, double q) {
  const std::size_t n = c.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > s) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) acc += std::pow(std::abs(c[i]), q);
    }
    best = std::min(best, std::pow(acc, 1.0 / q));
  }
  return best;
}

std::vector<double> synthetic(double p, double a, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double di = static_cast<double>(i);
    c[i - 1] = std::pow(di, -1.0 / p) * std::pow(std::max(1.0, std::log(di)), a / p);
  }
  return c;
}

} // namespace

TEST_CASE("rearrange") {
  const std::vector<cd> c = {3.0, -1.0, cd(0.0, 2.0)};
  const auto r = rearrange(std::span<const cd>(c));
  CHECK(r.magnitudes == std::vector<double>{3.0, 2.0, 1.0});
  CHECK(r.order == std::vector<std::size_t>{0, 2, 1});
  CHECK(rearrange(std::span<const cd>()).size() == 0);
  const std::vector<double> ties = {1.0, 1.0};
  const auto t = rearrange(std::span<const double>(ties));
  CHECK(t.magnitudes == std::vector<double>{1.0, 1.0});
  CHECK(t.order == std::vector<std::size_t>{0, 1});
}

TEST_CASE("lq norms") {
  const std::vector<double> v = {3.0, 4.0};
  CHECK(lq_norm(std::span<const double>(v), Exponent(2)) == doctest::Approx(5.0));
  CHECK(lq_norm(std::span<const double>(v), Exponent::infinity()) == 4.0);
  CHECK(lq_norm(std::span<const double>(), Exponent(1.5)) == 0.0);
  CHECK(lq_norm(std::span<const double>(v), Exponent(1)) == 7.0);
  // tiny and huge entries do not under/overflow
  const std::vector<double> big = {1e300, 1e300};
  CHECK(lq_norm(std::span<const double>(big), Exponent(2)) == doctest::Approx(std::sqrt(2.0) * 1e300));
  CHECK_THROWS_AS(Exponent(0.0), PreconditionError);
  CHECK_THROWS_AS(Exponent(std::numeric_limits<double>::infinity()), PreconditionError);
}

TEST_CASE("weak Lorentz norm") {
  std::vector<double> c(100);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 / std::sqrt(static_cast<double>(i + 1));
  CHECK(weak_lorentz_norm(std::span<const double>(c), 2.0, 0.0) == doctest::Approx(1.0));
  const std::vector<double> one = {5.0};
  CHECK(weak_lorentz_norm(std::span<const double>(one), 1.0, 3.0) == 5.0);
  const std::vector<double> two = {1.0, 1.0};
  CHECK(weak_lorentz_norm(std::span<const double>(two), 2.0, 0.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS((void)weak_lorentz_norm(std::span<const double>(two), 0.0, 0.0), PreconditionError);
  CHECK_THROWS_AS((void)weak_lorentz_norm(std::span<const double>(two), 1.0, -1.0), PreconditionError);
}

TEST_CASE("best s-term error examples") {
  const std::vector<double> c = {3.0, 1.0, 2.0};
  const std::span<const double> sc(c);
  CHECK(best_s_term_error(sc, 1, Exponent(2)) == doctest::Approx(std::sqrt(5.0)));
  CHECK(best_s_term_error(sc, 2, Exponent(1)) == doctest::Approx(1.0));
  CHECK(best_s_term_error(sc, 0, Exponent::infinity()) == 3.0);
  CHECK(best_s_term_error(sc, 3, Exponent(2)) == 0.0);
  CHECK(best_s_term_error(sc, 10, Exponent(2)) == 0.0);
  CHECK(best_s_term_error(sc, 0, Exponent(2)) == doctest::Approx(lq_norm(sc, Exponent(2))));
}

TEST_CASE("best s-term error equals the exhaustive minimum") {
  const CounterRng rng(7, 100);
  std::uint64_t ctr = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_at(ctr++) * 10);
    std::vector<double> c(n);
    for (auto& v : c) v = (rng.uniform_at(ctr++) - 0.5) * 10.0;
    if (trial % 5 == 0 && n > 1) c[1] = c[0];  // exercise ties
    for (std::size_t s = 0; s <= 3; ++s) {
      for (double q : {1.0, 2.0}) {
        const double fast = best_s_term_error(std::span<const double>(c), s, Exponent(q));
        REQUIRE(std::abs(fast - exhaustive_sigma(c, s, q)) <= 1e-12 * std::max(1.0, fast));
      }
    }
  }
}

TEST_CASE("sigma_s is non-increasing and bounded by the norm; profile agrees") {
  const CounterRng rng(3, 9);
  std::vector<cd> c(300);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = {rng.uniform_at(2 * i) - 0.5, rng.uniform_at(2 * i + 1) - 0.5};
  const auto r = rearrange(std::span<const cd>(c));
  for (auto q : {Exponent(0.5), Exponent(1), Exponent(2), Exponent::infinity()}) {
    const auto prof = best_s_term_profile(r, q);
    REQUIRE(prof.size() == c.size() + 1);
    CHECK(prof.front() == doctest::Approx(lq_norm(std::span<const cd>(c), q)));
    CHECK(prof.back() == 0.0);
    for (std::size_t s = 1; s < prof.size(); ++s) REQUIRE(prof[s] <= prof[s - 1] * (1 + 1e-14));
    for (std::size_t s : {0u, 1u, 17u, 150u, 299u}) {
      REQUIRE(prof[s] == doctest::Approx(best_s_term_error(std::span<const cd>(c), s, q)).epsilon(1e-12));
      REQUIRE(tail_norm(r, s, q) == doctest::Approx(prof[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("rearrangement preserves every lq norm") {
  const std::vector<double> c = {0.3, -2.0, 1.5, 0.0, 7.25, -0.1};
  const auto r = rearrange(std::span<const double>(c));
  for (double q : {0.3, 1.0, 2.0, 5.0}) {
    CHECK(lq_norm(std::span<const double>(r.magnitudes), Exponent(q)) ==
          doctest::Approx(lq_norm(std::span<const double>(c), Exponent(q))));
  }
}

TEST_CASE("stechkin_rhs") {
  CHECK(stechkin_rhs(0, 1, Exponent(2), 0, 1) == 1.0);
  CHECK(stechkin_rhs(4, 1, Exponent::infinity(), 0, 3) == doctest::Approx(0.75));
  // s = e^2: (e^2)^{-1/2} * (log e^2)^{1} = 2/e
  CHECK(stechkin_rhs(std::exp(2.0), 1, Exponent(2), 1, 1) == doctest::Approx(2.0 / std::exp(1.0)));
  CHECK_THROWS_AS((void)stechkin_rhs(1, 2, Exponent(2), 0, 1), PreconditionError);
  CHECK_THROWS_AS((void)stechkin_rhs(1, 2, Exponent(1), 0, 1), PreconditionError);
  CHECK_THROWS_AS((void)stechkin_rhs(1, 1, Exponent(2), -0.5, 1), PreconditionError);
}

TEST_CASE("Stechkin forward: sigma_s / rhs stays bounded") {
  struct Triple {
    double p, q, a;
  };
  for (const auto t : {Triple{1, 2, 0}, Triple{1, 2, 1}, Triple{2.0 / 3.0, 1, 0.5}}) {
    const auto c = synthetic(t.p, t.a, 200000);
    CHECK(weak_lorentz_norm(std::span<const double>(c), t.p, t.a) == doctest::Approx(1.0));
    const auto prof = best_s_term_profile(rearrange(std::span<const double>(c)), Exponent(t.q));
    double worst = 0.0;
    for (std::size_t s = 0; s <= 10000; ++s) {
      worst = std::max(worst, prof[s] / stechkin_rhs(static_cast<double>(s), t.p, Exponent(t.q), t.a, 1.0));
    }
    CAPTURE(t.p);
    CAPTURE(t.a);
    CHECK(worst <= 100.0);
  }
}

TEST_CASE("Stechkin converse with factor 2^{1/p+1/q}") {
  CHECK(stechkin_converse_factor(1, Exponent(2)) == doctest::Approx(std::pow(2.0, 1.5)));
  CHECK(stechkin_converse_factor(0.5, Exponent::infinity()) == doctest::Approx(4.0));
  const CounterRng rng(11, 1);
  std::uint64_t ctr = 0;
  struct Triple {
    double p, q, a;
  };
  for (const auto t : {Triple{1, 2, 0}, Triple{1, 2, 1}, Triple{2.0 / 3.0, 1, 0.5}}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_at(ctr++) * 400);
      std::vector<double> c(n);
      for (auto& v : c) v = std::pow(rng.uniform_at(ctr++), 3.0) * (rng.uniform_at(ctr++) < 0.5 ? -1 : 1);
      const double cc = stechkin_converse_constant(std::span<const double>(c), t.p, Exponent(t.q), t.a);
      REQUIRE(weak_lorentz_norm(std::span<const double>(c), t.p, t.a) <=
              stechkin_converse_factor(t.p, Exponent(t.q)) * cc * (1 + 1e-12));
    }
    const auto c = synthetic(t.p, t.a, 5000);
    const double cc = stechkin_converse_constant(std::span<const double>(c), t.p, Exponent(t.q), t.a);
    CHECK(weak_lorentz_norm(std::span<const double>(c), t.p, t.a) <=
          stechkin_converse_factor(t.p, Exponent(t.q)) * cc);
  }
}
