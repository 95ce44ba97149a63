#include "anisorec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "anisorec/error.hpp"
#include "anisorec/indexsets.hpp"
#include "anisorec/kernels.hpp"
#include "anisorec/rng.hpp"
#include "anisorec/sensing.hpp"
#include "anisorec/widths.hpp"

namespace anisorec::experiment {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Exponent the error should decay with: -h for mixed, -g for sum.
double target_slope(const SmoothnessClass& cls) {
  if (const auto* a = std::get_if<AnisotropyMixed>(&cls)) return -a->h();
  return -std::get<AnisotropySum>(cls).g();
}

std::optional<double> rate_or_none(double mt, const SmoothnessClass& cls) {
  try {
    return theoretical_rate(mt, cls);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

/// Run body(i) for i in [0, n) on `workers` threads. Results must be written by index;
/// the first exception in index order is rethrown.
template <class F>
void parallel_for(std::size_t n, int workers, F&& body) {
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
          failed = true;
        }
      }
    };
    std::vector<std::jthread> pool;
    const auto t = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    for (std::size_t k = 0; k < t; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

PeriodicFunction make_function(const TestFunction& tf, const SmoothnessClass& cls, const IndexSet& extremal_support,
                               const RecoveryPlan& p, std::uint64_t seed) {
  if (tf.kind == "zero") return PeriodicFunction(p.d);
  if (tf.kind == "sparse") return generate_sparse(p.lambda_set, std::min(tf.sparsity, p.lambda_set.size()), seed);
  return generate_extremal(cls, extremal_support, tf.decay_margin, seed);
}

struct Cell {
  double error = 0.0;
  double relative = 0.0;
  int iters = 0;
  bool converged = true;
};

Cell to_cell(const PeriodicFunction& f, const Reconstruction& rec) {
  Cell c;
  c.error = l2_error(f, rec.function);
  const double nf = l2_norm(f);
  c.relative = nf > 0.0 ? c.error / nf : c.error;
  c.iters = rec.solver.iters_used;
  c.converged = rec.solver.converged;
  return c;
}

Cell recover_one(const MeasurementOperator& op, const PeriodicFunction& f, const RecoveryPlan& p,
                 const RecoveryConfig& rc) {
  return to_cell(f, reconstruct(op, evaluate_many(f, op.samples().coords()), p, rc));
}

const std::vector<std::string> kRecoveryColumns = {"m", "m_tilde", "s", "r", "N", "capped", "class", "seed",
                                                   "l2_error", "theoretical_rate", "ratio", "relative_error",
                                                   "iters", "converged"};

std::vector<std::string> recovery_row(const RecoveryPlan& p, const std::string& label, std::uint64_t seed,
                                      const Cell& cell, const SmoothnessClass& cls) {
  const auto rate = rate_or_none(p.m_tilde, cls);
  std::optional<double> ratio;
  if (rate) ratio = cell.error / *rate;
  return {std::to_string(p.m), fmt(p.m_tilde), std::to_string(p.s), std::to_string(p.r), std::to_string(p.n),
          p.capped ? "1" : "0", label, std::to_string(seed), fmt(cell.error), fmt_opt(rate), fmt_opt(ratio),
          fmt(cell.relative), std::to_string(cell.iters), cell.converged ? "1" : "0"};
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

} // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need at least two points of equal length");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    detail::require(x[i] > 0.0 && y[i] > 0.0, "loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  detail::require(sxx > 0.0, "loglog_slope: x values are all equal");
  return sxy / sxx;
}

void ExperimentConfig::validate(const std::string& command) const {
  detail::require(d >= 1, "config: d must be >= 1");
  detail::require(workers >= 1, "config: workers must be >= 1");
  if (command == "count") {
    detail::require(std::isfinite(r) && r >= 0.0, "config: r must be finite and >= 0");
    if (count_kind != "hc") {
      const auto cls = parse_class(count_kind);
      detail::require(class_dim(cls) == static_cast<std::size_t>(d), "config: count class dimension differs from d");
    }
    return;
  }
  detail::require(!classes.empty(), "config: classes must not be empty");
  for (const auto& label : classes) {
    const auto cls = parse_class(label);
    detail::require(class_dim(cls) == static_cast<std::size_t>(d),
                    "config: class " + label + " has dimension " + std::to_string(class_dim(cls)) + ", expected d = " +
                        std::to_string(d));
  }
  detail::require(!m_grid.empty(), "config: m grid must not be empty");
  if (command == "widths") return;
  recovery.validate();
  detail::require(!seeds.empty(), "config: seeds must not be empty");
  for (auto m : m_grid) detail::require(m >= 2, "config: every m must be >= 2");
  detail::require(function.kind == "extremal" || function.kind == "sparse" || function.kind == "zero",
                  "config: function.kind must be extremal, sparse or zero");
  detail::require(function.support_size >= 1, "config: function.support_size must be >= 1");
  detail::require(function.decay_margin > 0.0, "config: function.decay_margin must be > 0");
  detail::require(function.sparsity >= 1, "config: function.sparsity must be >= 1");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"d", c.d},
       {"classes", c.classes},
       {"m_grid", c.m_grid},
       {"seeds", c.seeds},
       {"recovery", c.recovery},
       {"function",
        {{"kind", c.function.kind},
         {"support_size", c.function.support_size},
         {"decay_margin", c.function.decay_margin},
         {"sparsity", c.function.sparsity}}},
       {"r", c.r},
       {"count_kind", c.count_kind},
       {"positive_only", c.positive_only},
       {"strict", c.strict}};
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base) {
  detail::require(j.is_object(), "config: top level must be a JSON object");
  static const std::vector<std::string> known = {"d", "classes", "m_grid", "seeds", "recovery", "function", "r",
                                                 "count_kind", "positive_only", "workers", "strict"};
  for (const auto& [key, value] : j.items()) {
    detail::require(std::find(known.begin(), known.end(), key) != known.end(), "config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("d")) base.d = j.at("d").get<int>();
    if (j.contains("classes")) base.classes = j.at("classes").get<std::vector<std::string>>();
    if (j.contains("m_grid")) base.m_grid = j.at("m_grid").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) base.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("recovery")) base.recovery = recovery_config_from_json(j.at("recovery"), base.recovery);
    if (j.contains("function")) {
      const auto& f = j.at("function");
      if (f.contains("kind")) base.function.kind = f.at("kind").get<std::string>();
      if (f.contains("support_size")) base.function.support_size = f.at("support_size").get<std::size_t>();
      if (f.contains("decay_margin")) base.function.decay_margin = f.at("decay_margin").get<double>();
      if (f.contains("sparsity")) base.function.sparsity = f.at("sparsity").get<std::size_t>();
    }
    if (j.contains("r")) base.r = j.at("r").get<double>();
    if (j.contains("count_kind")) base.count_kind = j.at("count_kind").get<std::string>();
    if (j.contains("positive_only")) base.positive_only = j.at("positive_only").get<bool>();
    if (j.contains("workers")) base.workers = j.at("workers").get<int>();
    if (j.contains("strict")) base.strict = j.at("strict").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
  return base;
}

nlohmann::json metadata(const std::string& command, const ExperimentConfig& c) {
  return {{"artifact", kArtifact},
          {"version", kVersion},
          {"command", command},
          {"config", c},
          {"prng", std::string(CounterRng::kIdentity)},
          {"kernels", kernels::active().name},
          {"c_prime_note", "c_prime stands in for an unquantified theoretical constant"}};
}

void write_report(std::ostream& os, const Report& r) {
  os << "# " << r.metadata.dump() << '\n';
  for (std::size_t k = 0; k < r.columns.size(); ++k) os << (k ? "," : "") << csv_cell(r.columns[k]);
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_cell(row[k]);
    os << '\n';
  }
  for (const auto& s : r.summary) os << "# " << s.dump() << '\n';
}

Report run_count(const ExperimentConfig& c) {
  c.validate("count");
  Report rep{metadata("count", c), {"d", "r", "kind", "count", "rate", "ratio"}, {}, {}, 0};
  std::uint64_t count = 0;
  double rate = 0.0;
  const double lr = std::max(1.0, std::log(std::max(c.r, 1.0)));
  if (c.count_kind == "hc") {
    count = hyperbolic_cross_size(c.d, c.r);
    rate = c.r * std::pow(lr, c.d - 1);
  } else {
    const auto cls = parse_class(c.count_kind);
    if (const auto* a = std::get_if<AnisotropyMixed>(&cls)) {
      count = count_mixed(c.d, c.r, *a, c.positive_only);
      rate = std::pow(c.r, 1.0 / a->h()) * std::pow(lr, a->p() - 1);
    } else {
      const auto& b = std::get<AnisotropySum>(cls);
      count = count_sum(c.d, c.r, b);
      rate = std::pow(c.r, 1.0 / b.g());
    }
  }
  const std::string kind = c.count_kind == "hc" ? "hc" : c.count_kind + (c.positive_only ? "+" : "");
  rep.rows.push_back({std::to_string(c.d), fmt(c.r), kind, std::to_string(count), fmt(rate),
                      rate > 0.0 ? fmt(static_cast<double>(count) / rate) : std::string{}});
  return rep;
}

Report run_recover(const ExperimentConfig& c) {
  c.validate("recover");
  Report rep{metadata("recover", c), kRecoveryColumns, {}, {}, 0};
  const auto cls = parse_class(c.classes.front());
  const std::size_t m = c.m_grid.front();
  const std::uint64_t seed = c.seeds.front();
  const RecoveryPlan p = plan(m, c.d, c.recovery);
  const IndexSet support =
      c.function.kind == "extremal" ? smallest_weight_support(cls, c.function.support_size) : IndexSet{};
  const auto f = make_function(c.function, cls, support, p, seed);
  const MeasurementOperator op(draw_uniform_samples(m, c.d, seed), p.lambda_set, true);
  const Cell cell = recover_one(op, f, p, c.recovery);
  rep.rows.push_back(recovery_row(p, c.classes.front(), seed, cell, cls));
  rep.nonconverged = cell.converged ? 0 : 1;
  rep.summary.push_back({{"plan", p}});
  return rep;
}

Report run_rate_sweep(const ExperimentConfig& c) {
  c.validate("rate-sweep");
  Report rep{metadata("rate-sweep", c), kRecoveryColumns, {}, {}, 0};
  const std::size_t nc = c.classes.size(), nm = c.m_grid.size(), ns = c.seeds.size();

  std::vector<SmoothnessClass> classes;
  std::vector<IndexSet> supports;
  for (const auto& label : c.classes) {
    classes.push_back(parse_class(label));
    supports.push_back(c.function.kind == "extremal" ? smallest_weight_support(classes.back(), c.function.support_size)
                                                     : IndexSet{});
  }
  std::vector<RecoveryPlan> plans;
  for (auto m : c.m_grid) plans.push_back(plan(m, c.d, c.recovery));

  // One operator per (m, seed), reused for every class: the pipeline never looks at the class.
  std::vector<Cell> cells(nc * nm * ns);
  parallel_for(nm * ns, c.workers, [&](std::size_t cell) {
    const std::size_t im = cell / ns, is = cell % ns;
    const auto& p = plans[im];
    const MeasurementOperator op(draw_uniform_samples(p.m, c.d, c.seeds[is]), p.lambda_set, true);
    // The classes share the operator, so their solves share passes over it.
    std::vector<PeriodicFunction> fs;
    std::vector<std::vector<Complex>> values;
    for (std::size_t ic = 0; ic < nc; ++ic) {
      fs.push_back(make_function(c.function, classes[ic], supports[ic], p, c.seeds[is]));
      values.push_back(evaluate_many(fs.back(), op.samples().coords()));
    }
    const auto recs = reconstruct_batch(op, values, p, c.recovery);
    for (std::size_t ic = 0; ic < nc; ++ic) cells[(ic * nm + im) * ns + is] = to_cell(fs[ic], recs[ic]);
  });

  for (std::size_t ic = 0; ic < nc; ++ic) {
    std::vector<double> mts, meds;
    nlohmann::json per_m = nlohmann::json::array();
    for (std::size_t im = 0; im < nm; ++im) {
      std::vector<double> errs;
      for (std::size_t is = 0; is < ns; ++is) {
        const Cell& cell = cells[(ic * nm + im) * ns + is];
        rep.rows.push_back(recovery_row(plans[im], c.classes[ic], c.seeds[is], cell, classes[ic]));
        if (!cell.converged) ++rep.nonconverged;
        errs.push_back(cell.error);
      }
      mts.push_back(plans[im].m_tilde);
      meds.push_back(median(errs));
      per_m.push_back({{"m", plans[im].m}, {"m_tilde", plans[im].m_tilde}, {"median_l2_error", meds.back()}});
    }
    int inversions = 0;
    for (std::size_t k = 1; k < meds.size(); ++k) inversions += meds[k] > meds[k - 1] ? 1 : 0;
    nlohmann::json s = {{"summary", "loglog_slope"},
                        {"class", c.classes[ic]},
                        {"target_slope", target_slope(classes[ic])},
                        {"medians", per_m},
                        {"inversions", inversions}};
    const bool fittable = nm >= 2 && std::all_of(meds.begin(), meds.end(), [](double v) { return v > 0.0; });
    s["fitted_slope"] = fittable ? nlohmann::json(loglog_slope(mts, meds)) : nlohmann::json(nullptr);
    rep.summary.push_back(std::move(s));
  }
  rep.summary.push_back({{"summary", "solver"}, {"nonconverged_cells", rep.nonconverged}});
  return rep;
}

Report run_widths(const ExperimentConfig& c) {
  c.validate("widths");
  Report rep{metadata("widths", c), {"class", "m", "lower", "upper", "rate"}, {}, {}, 0};
  const std::size_t mmax = *std::max_element(c.m_grid.begin(), c.m_grid.end());
  for (const auto& label : c.classes) {
    const auto cls = parse_class(label);
    const auto spec = weight_spectrum(cls, 2 * mmax + 1);
    for (auto m : c.m_grid) {
      const auto b = width_sandwich(spec, m);
      rep.rows.push_back({label, std::to_string(m), fmt(b.lower), fmt(b.upper),
                          m >= 2 ? fmt(width_rate(cls, static_cast<double>(m))) : std::string{}});
    }
    rep.summary.push_back({{"summary", "spectrum"},
                           {"class", label},
                           {"K", spec.sorted.size()},
                           {"threshold", spec.threshold},
                           {"enumerated", spec.enumerated}});
  }
  return rep;
}

} // namespace anisorec::experiment
