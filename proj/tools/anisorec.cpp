// anisorec: counting checks, single recoveries, rate sweeps and width tables.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anisorec/error.hpp"
#include "anisorec/experiment.hpp"

namespace {

namespace ex = anisorec::experiment;

enum Exit : int { kOk = 0, kValidation = 2, kCap = 3, kNonConverged = 4 };

struct Overrides {
  std::string config_path;
  std::optional<int> d;
  std::vector<std::size_t> m_grid;
  std::vector<std::uint64_t> seeds;
  std::optional<double> epsilon;
  std::optional<std::string> u;
  std::optional<double> c_prime;
  std::optional<std::size_t> cap;
  std::optional<int> workers;
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::vector<std::string> classes;
  std::optional<std::string> function;
  std::optional<std::size_t> support_size;
  std::optional<std::size_t> sparsity;
  std::optional<double> decay_margin;
  // count
  std::optional<double> r;
  bool hc = false;
  std::vector<double> mixed;
  std::vector<double> sum;
  bool positive = false;
  bool strict = false;
  std::string out;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + ex::fmt(v[i]);
  return s;
}

ex::ExperimentConfig resolve(const Overrides& o) {
  ex::ExperimentConfig c;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw anisorec::PreconditionError("cannot open config " + o.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw anisorec::PreconditionError(std::string("config is not valid JSON: ") + e.what());
    }
    c = ex::config_from_json(j, c);
  }
  if (o.d) c.d = *o.d;
  if (!o.m_grid.empty()) c.m_grid = o.m_grid;
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.epsilon) c.recovery.epsilon = *o.epsilon;
  if (o.u) c.recovery.u = anisorec::GrowthFunction::parse(*o.u);
  if (o.c_prime) c.recovery.c_prime = *o.c_prime;
  if (o.cap) c.recovery.max_index_set_size = *o.cap;
  if (o.workers) c.workers = *o.workers;
  if (o.max_iters) c.recovery.solver.max_iters = *o.max_iters;
  if (o.tol) c.recovery.solver.tol = *o.tol;
  if (!o.classes.empty()) c.classes = o.classes;
  if (o.function) c.function.kind = *o.function;
  if (o.support_size) c.function.support_size = *o.support_size;
  if (o.sparsity) c.function.sparsity = *o.sparsity;
  if (o.decay_margin) c.function.decay_margin = *o.decay_margin;
  if (o.r) c.r = *o.r;
  const int picked = (o.hc ? 1 : 0) + (o.mixed.empty() ? 0 : 1) + (o.sum.empty() ? 0 : 1);
  if (picked > 1) throw anisorec::PreconditionError("choose at most one of --hc, --mixed, --sum");
  if (o.hc) c.count_kind = "hc";
  if (!o.mixed.empty()) c.count_kind = "mixed:" + join(o.mixed);
  if (!o.sum.empty()) c.count_kind = "sum:" + join(o.sum);
  if (o.positive) c.positive_only = true;
  if (o.strict) c.strict = true;
  return c;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

int run(const std::string& command, const Overrides& o) {
  const auto cfg = resolve(o);
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  ex::Report rep;
  if (command == "count") rep = ex::run_count(cfg);
  else if (command == "recover") rep = ex::run_recover(cfg);
  else if (command == "rate-sweep") rep = ex::run_rate_sweep(cfg);
  else rep = ex::run_widths(cfg);

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // Wall-clock lives beside the table so the table itself stays byte-reproducible.
  const nlohmann::json run_info = {{"artifact", ex::kArtifact}, {"version", ex::kVersion}, {"command", command},
                                   {"started_utc", started},     {"elapsed_seconds", elapsed},
                                   {"workers", cfg.workers}};
  if (o.out.empty()) {
    ex::write_report(std::cout, rep);
    std::cerr << "# run " << run_info.dump() << '\n';
  } else {
    const std::filesystem::path path(o.out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw anisorec::PreconditionError("cannot write " + o.out);
    ex::write_report(os, rep);
    std::ofstream(o.out + ".run.json", std::ios::binary) << run_info.dump(2) << '\n';
  }
  if (cfg.strict && rep.nonconverged > 0) {
    std::cerr << "error: solver did not converge in " << rep.nonconverged << " cell(s)\n";
    return kNonConverged;
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal sampling recovery of anisotropic periodic functions"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
    sub->add_option("--d", o.d, "dimension");
    sub->add_option("--out", o.out, "output CSV path (stdout when omitted)");
  };
  auto add_recovery = [&](CLI::App* sub) {
    sub->add_option("--m-grid", o.m_grid, "comma-separated sample budgets")->delimiter(',');
    sub->add_option("--seeds", o.seeds, "comma-separated seeds")->delimiter(',');
    sub->add_option("--epsilon", o.epsilon, "failure probability in (0,1)");
    sub->add_option("--u", o.u, "growth function: loglog, log, const:V, table:m=u;...");
    sub->add_option("--c-prime", o.c_prime, "stand-in for the sparsity constant");
    sub->add_option("--cap", o.cap, "largest admissible index-set size");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_option("--max-iters", o.max_iters, "solver iteration limit");
    sub->add_option("--tol", o.tol, "solver tolerance");
    sub->add_option("--class", o.classes, "smoothness class, e.g. mixed:1,2 or sum:2,2 (repeatable)");
    sub->add_option("--function", o.function, "test function: extremal, sparse, zero");
    sub->add_option("--support-size", o.support_size, "extremal test-function support size");
    sub->add_option("--sparsity", o.sparsity, "number of modes for --function sparse");
    sub->add_option("--decay-margin", o.decay_margin, "extremal coefficient decay margin");
    sub->add_flag("--strict", o.strict, "exit 4 when the solver does not converge");
  };

  auto* count = app.add_subcommand("count", "count a sublevel set and compare with its growth rate");
  add_common(count);
  count->add_option("--r", o.r, "order / level");
  count->add_flag("--hc", o.hc, "hyperbolic cross, prod (1+|n_j|) <= r");
  count->add_option("--mixed", o.mixed, "alpha: prod (1+|n_j|)^alpha_j < r")->delimiter(',');
  count->add_option("--sum", o.sum, "beta: sum |n_j|^beta_j < r")->delimiter(',');
  count->add_flag("--positive", o.positive, "restrict --mixed to the positive orthant");

  auto* recover = app.add_subcommand("recover", "one seeded end-to-end recovery");
  add_common(recover);
  add_recovery(recover);

  auto* sweep = app.add_subcommand("rate-sweep", "errors over an (m, seed, class) grid with fitted slopes");
  add_common(sweep);
  add_recovery(sweep);

  auto* widths = app.add_subcommand("widths", "sandwich bounds on adaptive widths");
  add_common(widths);
  widths->add_option("--m-grid", o.m_grid, "comma-separated width indices")->delimiter(',');
  widths->add_option("--class", o.classes, "smoothness class (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const anisorec::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
