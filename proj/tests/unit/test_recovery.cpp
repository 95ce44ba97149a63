#include <doctest.h>

#include <cmath>

#include "anisorec/error.hpp"
#include "anisorec/recovery.hpp"

using namespace anisorec;

namespace {

RecoveryConfig with_u(GrowthFunction u, double eps = 0.5) {
  RecoveryConfig c;
  c.u = std::move(u);
  c.epsilon = eps;
  return c;
}

} // namespace

TEST_CASE("growth function") {
  const RecoveryConfig ll;
  CHECK(u_value(ll, 2.0) == 1.0);
  CHECK(u_value(ll, 1e6) == doctest::Approx(std::log(std::log(1e6))));
  CHECK(u_value(ll, 1e6) == doctest::Approx(2.62579).epsilon(1e-5));
  CHECK(u_value(with_u(GrowthFunction::log()), std::exp(1.0) - 1) == doctest::Approx(1.0));
  CHECK(u_value(with_u(GrowthFunction::constant(2.5)), 77) == 2.5);
  const auto t = GrowthFunction::table({{1, 1.0}, {100, 2.0}, {1000, 3.0}});
  CHECK(t(50) == 1.0);
  CHECK(t(100) == 2.0);
  CHECK(t(5000) == 3.0);
  for (double m = 1; m < 1e7; m *= 1.7) REQUIRE(ll.u(m * 1.7) >= ll.u(m));

  CHECK(GrowthFunction::parse("loglog").kind() == GrowthFunction::Kind::LogLog);
  CHECK(GrowthFunction::parse("const:1.5")(10) == 1.5);
  CHECK(GrowthFunction::parse(t.label())(5000) == 3.0);
  CHECK(GrowthFunction::parse(GrowthFunction::constant(0.1).label())(3) == 0.1);
  CHECK_THROWS_AS((void)GrowthFunction::parse("quadratic"), PreconditionError);
  CHECK_THROWS_AS((void)GrowthFunction::parse("const:x"), PreconditionError);
  CHECK_THROWS_AS((void)GrowthFunction::parse("const:-1"), PreconditionError);
  CHECK_THROWS_AS((void)GrowthFunction::parse("table:5=2;3=4"), PreconditionError);
  CHECK_THROWS_AS((void)GrowthFunction::table({{1, 2.0}, {2, 1.0}}), PreconditionError);
}

TEST_CASE("effective budget") {
  const auto c = with_u(GrowthFunction::constant(1.0), std::exp(-1.0));
  const double e2 = std::exp(2.0);
  CHECK(m_tilde(e2, c) == doctest::Approx(e2 / 9).epsilon(1e-12));
  CHECK(m_tilde(e2, c) == doctest::Approx(0.8210).epsilon(1e-4));
  const auto near_one = with_u(GrowthFunction::constant(1.0), 1 - 1e-12);
  CHECK(m_tilde(1000, near_one) == doctest::Approx(1000 / std::pow(std::log(1000.0), 3)).epsilon(1e-9));
  // m / log^3 m only starts increasing at m = e^3; with loglog u the last dip is at m = 41
  const RecoveryConfig ll;
  double prev = m_tilde(42, ll);
  for (double m = 43; m <= 1e6; m = std::floor(m * 1.05) + 1) {
    const double v = m_tilde(m, ll);
    REQUIRE(v > prev);
    prev = v;
  }
  CHECK(m_tilde(20, ll) < m_tilde(10, ll));
  CHECK_THROWS_AS((void)m_tilde(1.5, ll), PreconditionError);
}

TEST_CASE("plan") {
  RecoveryConfig huge;
  huge.c_prime = 1e9;
  const auto p = plan(1024, 3, huge);
  CHECK(p.s == 1);
  CHECK(p.r == 1);
  CHECK(p.n == 1);
  CHECK(p.lambda_set.index(0) == MultiIndex{0, 0, 0});
  CHECK(p.lambda == doctest::Approx(0.28434).epsilon(1e-4));
  CHECK_FALSE(p.capped);

  const RecoveryConfig def;
  const auto a = plan(1024, 2, def), b = plan(1024, 2, def);
  CHECK(nlohmann::json(a).dump() == nlohmann::json(b).dump());
  CHECK(a.lambda_set == b.lambda_set);
  const auto j = nlohmann::json(a);
  for (const char* k : {"m", "d", "u", "s", "r", "r_uncapped", "lambda", "N", "m_tilde", "capped", "prng"}) CHECK(j.contains(k));

  RecoveryConfig small;
  small.c_prime = 1e-6;
  for (std::size_t m : {2u, 3u, 10u, 64u, 1000u, 4096u}) {
    for (int d : {1, 2, 3}) {
      for (double cp : {1e-6, 0.05, 1.0}) {
        RecoveryConfig c;
        c.c_prime = cp;
        c.max_index_set_size = 2000;
        const auto q = plan(m, d, c);
        REQUIRE(q.s >= 1);
        REQUIRE(q.s <= m);
        REQUIRE(q.r >= 1);
        REQUIRE(q.n == q.lambda_set.size());
        REQUIRE(q.n <= c.max_index_set_size);
        REQUIRE(q.lambda > 0.0);
        REQUIRE(q.lambda <= lambda_upper_limit(RnspConstants::from_rip_quarter(), q.s) * (1 + 1e-14));
        REQUIRE(q.capped == (q.r_uncapped > static_cast<double>(q.r)));
        REQUIRE(q.lambda_set == hyperbolic_cross(d, static_cast<double>(q.r)));
      }
    }
  }
  // tiny c' forces s = m and an order far past the cap
  const auto capped = plan(4096, 2, small);
  CHECK(capped.s == 4096);
  CHECK(capped.capped);
  CHECK(capped.r == largest_order_within(2, small.max_index_set_size));
  CHECK_THROWS_AS((void)plan(1, 2, def), PreconditionError);
  CHECK_THROWS_AS((void)plan(64, 0, def), PreconditionError);
  RecoveryConfig bad;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS((void)plan(64, 2, bad), PreconditionError);
}

TEST_CASE("sparsity formula") {
  RecoveryConfig c;
  c.c_prime = 0.05;
  const double m = 2048, u = c.u(m), ul = u * std::log(m), l2 = std::log(2 * m);
  const double s = std::floor(m / (0.05 * (l2 * l2 * (std::log(2.0) + ul + std::log(1 + ul)) + std::log(2.0))));
  CHECK(sparsity_level(2048, 2, c) == static_cast<std::size_t>(s));
}

TEST_CASE("reconstruct") {
  RecoveryConfig c;
  c.c_prime = 0.05;
  c.solver.tol = 1e-10;
  c.solver.max_iters = 20000;
  const auto p = plan(64, 2, c);
  REQUIRE(p.n > 10);
  const auto x = draw_uniform_samples(64, 2, 11);

  const auto zero = reconstruct(x, std::vector<Complex>(64), p, c);
  CHECK(zero.function.support_size() == 0);

  // single mode inside Lambda, noiseless
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto xs = draw_uniform_samples(64, 2, 100 + seed);
    const auto f = generate_sparse(p.lambda_set, 1, seed);
    const auto rec = reconstruct(xs, evaluate_many(f, xs.coords()), p, c);
    if (l2_error(f, rec.function) <= 1e-4) ++hits;
  }
  CHECK(hits >= 18);

  // mode outside Lambda: lambda ||z#||_1 <= objective(0) = ||b||
  PeriodicFunction::CoeffMap out{{MultiIndex{40, 3}, Complex(0.0, 2.0)}};
  const PeriodicFunction g(2, out);
  const auto vals = evaluate_many(g, x.coords());
  const auto rec = reconstruct(x, vals, p, c);
  double bnorm = 0.0;
  for (const auto& v : vals) bnorm += std::norm(v) / 64.0;
  bnorm = std::sqrt(bnorm);
  CHECK(l2_norm(rec.function) <= 2 * kPi * bnorm / p.lambda + 1e-12);

  CHECK_THROWS_AS((void)reconstruct(x, std::vector<Complex>(63), p, c), DimensionMismatch);
  CHECK_THROWS_AS((void)reconstruct(draw_uniform_samples(64, 3, 0), std::vector<Complex>(64), p, c), DimensionMismatch);
  const MeasurementOperator unscaled(x, p.lambda_set, false);
  CHECK_THROWS_AS((void)reconstruct(unscaled, std::vector<Complex>(64), p, c), PreconditionError);
  std::vector<Complex> nan(64);
  nan[3] = {std::nan(""), 0.0};
  CHECK_THROWS_AS((void)reconstruct(x, nan, p, c), NonFiniteInput);
}

TEST_CASE("batched reconstruction matches single reconstructions") {
  RecoveryConfig c;
  c.c_prime = 0.05;
  c.solver.tol = 1e-6;
  const auto p = plan(128, 2, c);
  const MeasurementOperator op(draw_uniform_samples(128, 2, 5), p.lambda_set, true);
  std::vector<std::vector<Complex>> values;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    values.push_back(evaluate_many(generate_sparse(p.lambda_set, 2 + seed, seed), op.samples().coords()));
  }
  const auto batch = reconstruct_batch(op, values, p, c);
  REQUIRE(batch.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto one = reconstruct(op, values[j], p, c);
    CHECK(batch[j].function == one.function);
    CHECK(batch[j].solver.iters_used == one.solver.iters_used);
  }
  values[1].pop_back();
  CHECK_THROWS_AS((void)reconstruct_batch(op, values, p, c), DimensionMismatch);
}

TEST_CASE("theoretical rate") {
  const double e = std::exp(1.0);
  CHECK(theoretical_rate(e, AnisotropyMixed({1, 1})) == doctest::Approx(1 / e));
  CHECK(theoretical_rate(100, AnisotropySum({2, 2})) == doctest::Approx(0.01));
  CHECK(theoretical_rate(e * e, AnisotropyMixed({2, 3})) == doctest::Approx(0.018316).epsilon(1e-5));
  CHECK(theoretical_rate(0.5, AnisotropyMixed({1, 2})) == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)theoretical_rate(0.5, AnisotropyMixed({1, 1})), PreconditionError);
  CHECK_THROWS_AS((void)theoretical_rate(0.0, AnisotropySum({1})), PreconditionError);
}

TEST_CASE("config JSON round trip") {
  RecoveryConfig c;
  c.epsilon = 0.1;
  c.u = GrowthFunction::table({{1, 1.0}, {64.5, 1.25}});
  c.c_prime = 0.05;
  c.max_index_set_size = 123;
  c.solver.tol = 1e-4;
  c.solver.adaptive_steps = false;
  const nlohmann::json j = c;
  const auto back = recovery_config_from_json(j);
  CHECK(nlohmann::json(back) == j);
  CHECK(recovery_config_from_json(nlohmann::json::object()).c_prime == 1.0);
}
