#include "anisorec/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anisorec/error.hpp"
#include "anisorec/rng.hpp"

namespace anisorec {

GrowthFunction GrowthFunction::constant(double value) {
  detail::require(std::isfinite(value) && value > 0.0, "GrowthFunction: constant must be finite and > 0");
  GrowthFunction g(Kind::Constant);
  g.value_ = value;
  return g;
}

GrowthFunction GrowthFunction::table(std::vector<std::pair<double, double>> breakpoints) {
  detail::require(!breakpoints.empty(), "GrowthFunction: table needs at least one breakpoint");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    detail::require(breakpoints[i].second > 0.0 && std::isfinite(breakpoints[i].second),
                    "GrowthFunction: table values must be finite and > 0");
    if (i > 0) {
      detail::require(breakpoints[i].first > breakpoints[i - 1].first, "GrowthFunction: table thresholds must increase");
      detail::require(breakpoints[i].second >= breakpoints[i - 1].second, "GrowthFunction: table values must be nondecreasing");
    }
  }
  GrowthFunction g(Kind::Table);
  g.table_ = std::move(breakpoints);
  return g;
}

GrowthFunction GrowthFunction::parse(const std::string& spec) {
  if (spec == "loglog") return log_log();
  if (spec == "log") return log();
  try {
    if (spec.rfind("const:", 0) == 0) {
      std::size_t used = 0;
      const std::string v = spec.substr(6);
      const double value = std::stod(v, &used);
      detail::require(used == v.size(), "GrowthFunction: bad constant in " + spec);
      return constant(value);
    }
    if (spec.rfind("table:", 0) == 0) {
      std::vector<std::pair<double, double>> bp;
      std::stringstream ss(spec.substr(6));
      std::string item;
      while (std::getline(ss, item, ';')) {
        const auto eq = item.find('=');
        detail::require(eq != std::string::npos, "GrowthFunction: table entries look like m=u");
        bp.emplace_back(std::stod(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
      }
      return table(std::move(bp));
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const PreconditionError*>(&e) != nullptr) throw;
    throw PreconditionError("GrowthFunction: cannot parse " + spec);
  }
  throw PreconditionError("GrowthFunction: expected loglog, log, const:V or table:m=u;..., got " + spec);
}

std::string GrowthFunction::label() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::LogLog: return "loglog";
    case Kind::Log: return "log";
    case Kind::Constant: os << "const:" << value_; return os.str();
    case Kind::Table:
      os << "table:";
      for (std::size_t i = 0; i < table_.size(); ++i) os << (i ? ";" : "") << table_[i].first << '=' << table_[i].second;
      return os.str();
  }
  return {};
}

double GrowthFunction::operator()(double m) const {
  detail::require(m >= 1.0 && std::isfinite(m), "u(m): m must be >= 1");
  switch (kind_) {
    case Kind::LogLog: {
      const double lm = std::log(m);
      return lm > 1.0 ? std::max(1.0, std::log(lm)) : 1.0;
    }
    case Kind::Log: return std::log(m + 1.0);
    case Kind::Constant: return value_;
    case Kind::Table: {
      double u = table_.front().second;
      for (const auto& [thr, v] : table_) {
        if (thr <= m) u = v;
      }
      return u;
    }
  }
  return 1.0;
}

void RecoveryConfig::validate() const {
  detail::require(epsilon > 0.0 && epsilon < 1.0, "RecoveryConfig: epsilon must lie in (0, 1)");
  detail::require(c_prime > 0.0 && std::isfinite(c_prime), "RecoveryConfig: c_prime must be > 0");
  detail::require(max_index_set_size >= 1, "RecoveryConfig: index set cap must be >= 1");
  detail::require(solver.max_iters >= 1, "RecoveryConfig: solver.max_iters must be >= 1");
  detail::require(solver.tol > 0.0, "RecoveryConfig: solver.tol must be > 0");
  detail::require(solver.step_scale > 0.0 && solver.step_scale < 1.0, "RecoveryConfig: solver.step_scale must lie in (0, 1)");
}

void to_json(nlohmann::json& j, const RecoveryConfig& c) {
  j = {{"epsilon", c.epsilon},
       {"u", c.u.label()},
       {"c_prime", c.c_prime},
       {"cap", c.max_index_set_size},
       {"solver",
        {{"max_iters", c.solver.max_iters},
         {"tol", c.solver.tol},
         {"step_scale", c.solver.step_scale},
         {"power_iters", c.solver.power_iters},
         {"adaptive_steps", c.solver.adaptive_steps}}}};
}

RecoveryConfig recovery_config_from_json(const nlohmann::json& j, RecoveryConfig base) {
  if (j.contains("epsilon")) base.epsilon = j.at("epsilon").get<double>();
  if (j.contains("u")) base.u = GrowthFunction::parse(j.at("u").get<std::string>());
  if (j.contains("c_prime")) base.c_prime = j.at("c_prime").get<double>();
  if (j.contains("cap")) base.max_index_set_size = j.at("cap").get<std::size_t>();
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (s.contains("max_iters")) base.solver.max_iters = s.at("max_iters").get<int>();
    if (s.contains("tol")) base.solver.tol = s.at("tol").get<double>();
    if (s.contains("step_scale")) base.solver.step_scale = s.at("step_scale").get<double>();
    if (s.contains("power_iters")) base.solver.power_iters = s.at("power_iters").get<int>();
    if (s.contains("adaptive_steps")) base.solver.adaptive_steps = s.at("adaptive_steps").get<bool>();
  }
  return base;
}

void to_json(nlohmann::json& j, const RecoveryPlan& p) {
  j = {{"m", p.m},
       {"d", p.d},
       {"u", p.u},
       {"s", p.s},
       {"r", p.r},
       {"r_uncapped", p.r_uncapped},
       {"lambda", p.lambda},
       {"N", p.n},
       {"m_tilde", p.m_tilde},
       {"capped", p.capped},
       {"prng", std::string(CounterRng::kIdentity)}};
}

double u_value(const RecoveryConfig& cfg, double m) { return cfg.u(m); }

double m_tilde(double m, const RecoveryConfig& cfg) {
  detail::require(m >= 2.0, "m_tilde: m must be >= 2");
  detail::require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "m_tilde: epsilon must lie in (0, 1)");
  const double lm = std::log(m);
  return m / (lm * lm * lm * cfg.u(m) + std::log(1.0 / cfg.epsilon));
}

std::size_t sparsity_level(std::size_t m, int d, const RecoveryConfig& cfg) {
  detail::require(m >= 2, "sparsity_level: m must be >= 2");
  detail::require(d >= 1, "sparsity_level: d must be >= 1");
  cfg.validate();
  const auto md = static_cast<double>(m);
  const double u = cfg.u(md);
  const double ulm = u * std::log(md);
  const double l2m = std::log(2.0 * md);
  const double denom = cfg.c_prime * (l2m * l2m * (std::log(2.0) + ulm + (d - 1) * std::log(1.0 + ulm)) +
                                      std::log(1.0 / cfg.epsilon));
  const double raw = std::floor(md / denom);
  const auto s = raw < 1.0 ? std::size_t{1} : (raw > md ? m : static_cast<std::size_t>(raw));
  return std::min(s, m);
}

RecoveryPlan plan(std::size_t m, int d, const RecoveryConfig& cfg) {
  cfg.validate();
  RecoveryPlan p;
  p.m = m;
  p.d = d;
  p.s = sparsity_level(m, d, cfg);
  p.u = cfg.u(static_cast<double>(m));
  p.m_tilde = m_tilde(static_cast<double>(m), cfg);
  p.r_uncapped = std::ceil(std::pow(static_cast<double>(p.s), p.u));

  // The coordinate axes alone give 2r - 1 indices, so a huge order is rejected before counting.
  const double cap = static_cast<double>(cfg.max_index_set_size);
  const bool surely_over = 2.0 * p.r_uncapped - 1.0 > cap;
  if (surely_over || hyperbolic_cross_size(d, p.r_uncapped) > cfg.max_index_set_size) {
    p.r = largest_order_within(d, cfg.max_index_set_size);
    p.capped = true;
  } else {
    p.r = static_cast<std::uint64_t>(p.r_uncapped);
  }
  p.lambda_set = hyperbolic_cross(d, static_cast<double>(p.r), cfg.max_index_set_size);
  p.n = p.lambda_set.size();
  p.lambda = lambda_upper_limit(RnspConstants::from_rip_quarter(), p.s);
  return p;
}

Reconstruction reconstruct(const SampleSet& samples, std::span<const Complex> values, const RecoveryPlan& plan,
                           const RecoveryConfig& cfg) {
  if (samples.dim() != plan.d) throw DimensionMismatch("reconstruct: sample dimension differs from the plan");
  const MeasurementOperator op(samples, plan.lambda_set, /*scaled=*/true);
  return reconstruct(op, values, plan, cfg);
}

namespace {

void check_operator(const MeasurementOperator& op, std::size_t value_count, const RecoveryPlan& plan) {
  if (value_count != plan.m || op.rows() != plan.m) throw DimensionMismatch("reconstruct: value count differs from plan.m");
  if (!(op.columns() == plan.lambda_set) || !op.scaled()) {
    throw PreconditionError("reconstruct: operator must be the scaled operator on the plan's index set");
  }
}

std::vector<Complex> scaled_data(std::span<const Complex> values, std::size_t m) {
  std::vector<Complex> b(values.begin(), values.end());
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  for (auto& v : b) v *= inv_sqrt_m;
  return b;
}

PeriodicFunction to_function(const std::vector<Complex>& z, const RecoveryPlan& plan) {
  const double scale = 1.0 / basis_normalization(plan.d);
  PeriodicFunction::CoeffMap coeffs;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (z[k] != Complex{}) coeffs.emplace_hint(coeffs.end(), plan.lambda_set.index(k), scale * z[k]);
  }
  return PeriodicFunction(plan.d, std::move(coeffs));
}

} // namespace

Reconstruction reconstruct(const MeasurementOperator& op, std::span<const Complex> values, const RecoveryPlan& plan,
                           const RecoveryConfig& cfg) {
  check_operator(op, values.size(), plan);
  Reconstruction out{PeriodicFunction(plan.d), solve(op, scaled_data(values, plan.m), plan.lambda, cfg.solver)};
  out.function = to_function(out.solver.z_sharp, plan);
  return out;
}

std::vector<Reconstruction> reconstruct_batch(const MeasurementOperator& op, std::span<const std::vector<Complex>> values,
                                              const RecoveryPlan& plan, const RecoveryConfig& cfg) {
  std::vector<std::vector<Complex>> bs;
  for (const auto& v : values) {
    check_operator(op, v.size(), plan);
    bs.push_back(scaled_data(v, plan.m));
  }
  const std::vector<double> lambdas(bs.size(), plan.lambda);
  auto results = solve_batch(op, bs, lambdas, cfg.solver);
  std::vector<Reconstruction> out;
  for (auto& r : results) {
    auto f = to_function(r.z_sharp, plan);
    out.push_back({std::move(f), std::move(r)});
  }
  return out;
}

double theoretical_rate(double m_tilde_value, const SmoothnessClass& cls) {
  detail::require(m_tilde_value > 0.0 && std::isfinite(m_tilde_value), "theoretical_rate: m_tilde must be > 0");
  if (const auto* a = std::get_if<AnisotropyMixed>(&cls)) {
    if (a->p() == 1) return std::pow(m_tilde_value, -a->h());
    detail::require(m_tilde_value > 1.0, "theoretical_rate: m_tilde must exceed 1 when p(alpha) > 1");
    return std::pow(std::pow(std::log(m_tilde_value), a->p() - 1) / m_tilde_value, a->h());
  }
  return std::pow(m_tilde_value, -std::get<AnisotropySum>(cls).g());
}

} // namespace anisorec
