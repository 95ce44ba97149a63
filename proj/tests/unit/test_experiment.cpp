#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "anisorec/error.hpp"
#include "anisorec/experiment.hpp"

using namespace anisorec;
using namespace anisorec::experiment;

namespace {

std::string render(const Report& r) {
  std::ostringstream os;
  write_report(os, r);
  return os.str();
}

ExperimentConfig small_sweep() {
  ExperimentConfig c;
  c.m_grid = {32, 64};
  c.seeds = {0, 1};
  c.classes = {"mixed:1,1", "sum:2,2"};
  c.function.support_size = 100;
  c.recovery.c_prime = 0.05;
  c.recovery.solver.tol = 1e-4;
  return c;
}

int run_cli(const std::string& args, const std::string& out) {
  const std::string cmd = std::string(ANISOREC_CLI_PATH) + " " + args + " > " + out + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_CASE("validation") {
  ExperimentConfig c;
  c.m_grid.clear();
  CHECK_THROWS_AS(c.validate("rate-sweep"), PreconditionError);
  CHECK_NOTHROW(c.validate("count"));
  ExperimentConfig d;
  d.d = 3;
  CHECK_THROWS_AS(d.validate("recover"), PreconditionError);
  d.classes = {"mixed:1,1,1"};
  CHECK_NOTHROW(d.validate("recover"));
  ExperimentConfig e;
  e.function.kind = "gaussian";
  CHECK_THROWS_AS(e.validate("recover"), PreconditionError);
  CHECK_THROWS_AS((void)config_from_json(nlohmann::json{{"bogus", 1}}), PreconditionError);
  CHECK_THROWS_AS((void)config_from_json(nlohmann::json{{"d", "two"}}), PreconditionError);
}

TEST_CASE("config JSON round trip") {
  auto c = small_sweep();
  c.recovery.u = GrowthFunction::constant(1.5);
  const nlohmann::json j = c;
  CHECK(nlohmann::json(config_from_json(j)) == j);
}

TEST_CASE("count") {
  ExperimentConfig c;
  c.d = 2;
  c.r = 3;
  const auto r = run_count(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.columns.front() == "d");
  CHECK(r.rows[0][3] == "9");
  c.count_kind = "sum:2,2";
  c.r = 1;
  CHECK(run_count(c).rows[0][3] == "1");
  c.count_kind = "mixed:1,1";
  c.r = 4;
  c.positive_only = true;
  CHECK(run_count(c).rows[0][3] == "5");
  const auto text = render(r);
  CHECK(text.rfind("# {", 0) == 0);
  CHECK(text.find("\"prng\"") != std::string::npos);
}

TEST_CASE("recover zero function") {
  auto c = small_sweep();
  c.function.kind = "zero";
  const auto r = run_recover(c);
  REQUIRE(r.rows.size() == 1);
  const auto col = std::find(r.columns.begin(), r.columns.end(), "l2_error") - r.columns.begin();
  CHECK(r.rows[0][static_cast<std::size_t>(col)] == "0");
}

TEST_CASE("sweep determinism across runs and worker counts") {
  auto c = small_sweep();
  const auto a = render(run_rate_sweep(c));
  const auto b = render(run_rate_sweep(c));
  CHECK(a == b);
  c.workers = 2;
  CHECK(render(run_rate_sweep(c)) == a);
  const auto r = run_rate_sweep(c);
  CHECK(r.rows.size() == 2 * 2 * 2);
  CHECK(r.summary.size() == 3);
}

TEST_CASE("widths report") {
  ExperimentConfig c;
  c.d = 1;
  c.classes = {"sum:1"};
  c.m_grid = {1, 10};
  const auto r = run_widths(c);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0][2] == "0.5");
  CHECK(r.rows[0][3] == "0.5");
  CHECK(r.rows[0][4].empty());
}

TEST_CASE("loglog slope and fmt") {
  CHECK(loglog_slope({1, 10, 100}, {1, 0.1, 0.01}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS((void)loglog_slope({1}, {1}), PreconditionError);
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(2.0) == "2");
}

TEST_CASE("command line") {
  const auto dir = std::filesystem::temp_directory_path() / "anisorec_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = (dir / "o.txt").string();
  CHECK(run_cli("count --d 2 --r 3 --hc", out) == 0);
  CHECK(slurp(out).find("\n2,3,hc,9,") != std::string::npos);
  CHECK(run_cli("count --d 1 --r 4 --mixed 1", out) == 0);
  CHECK(run_cli("nonsense", out) == 2);
  CHECK(run_cli("count --r abc", out) == 2);
  CHECK(run_cli("rate-sweep --m-grid 1", out) == 2);
  CHECK(run_cli("rate-sweep --epsilon 2", out) == 2);
  CHECK(run_cli("count --d 2 --r 1e9 --hc", out) == 0);
  CHECK(run_cli("widths --d 2 --class mixed:1,1 --m-grid 100000000", out) == 3);
  const auto file = (dir / "w.csv").string();
  CHECK(run_cli("widths --d 1 --class sum:1 --m-grid 1,2 --out " + file, out) == 0);
  CHECK(std::filesystem::exists(file));
  CHECK(std::filesystem::exists(file + ".run.json"));
  CHECK(run_cli("recover --m-grid 64 --seeds 0 --max-iters 1 --strict --support-size 50", out) == 4);
  std::filesystem::remove_all(dir);
}
