#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cmcglue/cli.hpp"
#include "cmcglue/config.hpp"
#include "cmcglue/matching.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cmcglue;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run(const std::vector<std::string>& args, std::string* stdout_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (stdout_text) *stdout_text = out.str() + err.str();
  return code;
}

const char* kDelaunay =
    "construction = delaunay\nn = 2\nalpha = 0.618\nN = 5\nm = 1\nresolution = 16\n"
    "oracle_samples = 40\n";

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# chain\nconstruction = delaunay\nn = 3\n[delaunay]\nalpha = 0.6\nN = 5\nm = 1\n"
      "[handle]\nn1 = 2\n");
  CHECK(c.params.construction == Construction::delaunay);
  CHECK(c.params.n == 3);
  CHECK(c.params.n1 == 1);
  CHECK(c.params.tau == doctest::Approx(2 * pi / 5 - 1.2).epsilon(1e-14));
  CHECK(closure_tau(0.6, 5, 1) == doctest::Approx(2 * pi / 5 - 1.2));

  const RunConfig s = parse_config("construction = two_geodesic\nsigma = 0, 1e-4, -2e-4\n");
  CHECK(s.params.sigma == std::vector<double>{0.0, 1e-4, -2e-4});
  CHECK(parse_config("profile_only = yes\n").params.profile_only);

  for (const char* bad : {"colour = red\n", "[nowhere]\nn = 2\n", "n 2\n", "[delaunay\n",
                          "n = two\n", "construction = cube\n"})
    CHECK_THROWS_AS(parse_config(bad), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), Error);
}

TEST_CASE("group files") {
  TempDir t("cmcglue_group_test");
  write(t.path / "g.json",
        R"({"generators": [{"omega1": [[-1, 0], [0, -1]], "omega2": [[1, 0], [0, 1]]}]})");
  const std::string cfg = write(t.path / "run.cfg",
                                "construction = doubling\nN = 6\nm = 1\ntau = 0.02\ngroup_file = g.json\n");
  const RunConfig c = load_config(cfg);
  REQUIRE(c.params.group.size() == 1);
  CHECK(c.params.group[0].omega1(0, 0) == -1.0);
  write(t.path / "bad.json", R"({"generators": 3})");
  CHECK_THROWS(load_group_file((t.path / "bad.json").string()));
}

TEST_CASE("slope helpers") {
  CHECK(expected_error_slope(3, -0.5) == doctest::Approx(2.5 * 6 / 7));
  CHECK(fitted_slope({1.0, 10.0, 100.0}, {2.0, 200.0, 20000.0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(fitted_slope({1.0}, {1.0}), Error);
}

TEST_CASE("build writes a manifest") {
  TempDir t("cmcglue_build_test");
  const std::string cfg = write(t.path / "d.cfg", kDelaunay);
  CHECK(run({"build", "--config", cfg, "--out", (t.path / "out").string()}) == 0);
  const auto m = nlohmann::json::parse(slurp(t.path / "out" / "manifest.json"));
  CHECK(m["N"] == 5);
  CHECK(m["m"] == 1);
  const double tau = closure_tau(0.618, 5, 1);
  CHECK(m["eps"].get<double>() == doctest::Approx(solve_scale(2, 0.618, tau)).epsilon(1e-14));
  CHECK(fs::exists(t.path / "out" / "surface.obj"));

  // N/2 must be odd for the two-geodesic chain.
  const std::string g = write(t.path / "g.cfg",
                              "construction = two_geodesic\nalpha = 0.25\nN = 12\nm = 1\nresolution = 8\n");
  std::string text;
  CHECK(run({"build", "--config", g, "--out", (t.path / "g").string()}, &text) != 0);
  CHECK(text.find("N/2 odd") != std::string::npos);
}

TEST_CASE("verify exit codes and report") {
  TempDir t("cmcglue_verify_test");
  const std::string cfg = write(t.path / "d.cfg", kDelaunay);
  CHECK(run({"verify", "--config", cfg, "--out", (t.path / "ok").string()}) == 0);
  const auto r = nlohmann::json::parse(slurp(t.path / "ok" / "report.json"));
  CHECK(r["passed"] == true);
  REQUIRE(r["checks"].size() > 3);
  for (const auto& k : r["checks"])
    for (const char* key : {"name", "expected", "actual", "tolerance", "passed"}) CHECK(k.contains(key));

  const std::string wrong = write(t.path / "w.cfg", std::string(kDelaunay) + "eps_override = 1.2e-3\n");
  CHECK(run({"verify", "--config", wrong, "--out", (t.path / "bad").string()}) == 1);
  const auto b = nlohmann::json::parse(slurp(t.path / "bad" / "report.json"));
  bool slope_failed = false;
  for (const auto& k : b["checks"])
    if (k["name"] == "error_scaling_slope") slope_failed = !k["passed"].get<bool>();
  CHECK(slope_failed);

  CHECK(run({"verify", "--config", write(t.path / "x.cfg", "colour = red\n")}) == 2);
  CHECK(run({"verify"}) == 2);
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
}

TEST_CASE("sweep output") {
  TempDir t("cmcglue_sweep_test");
  const std::string cfg = write(
      t.path / "s.cfg",
      "construction = delaunay\nn = 3\nalpha = 0.62\nN = 5\nm = 1\nresolution = 32\n");
  const std::vector<std::string> args = {"sweep", "--config", cfg, "--tau-min", "0.0008", "--tau-max",
                                         "0.0085", "--steps", "6", "--seed", "3"};
  std::vector<std::string> a1 = args, a2 = args;
  a1.insert(a1.end(), {"--out", (t.path / "a").string()});
  a2.insert(a2.end(), {"--out", (t.path / "b").string()});
  CHECK(run(a1) == 0);
  CHECK(run(a2) == 0);
  const std::string csv = slurp(t.path / "a" / "sweep.csv");
  CHECK(csv == slurp(t.path / "b" / "sweep.csv"));

  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "tau,eps,rho,error_norm,neck_max,transition_max,exterior_max,status");
  double prev = 0.0, slope = 0.0, expected = 0.0;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.rfind("# slope", 0) == 0) {
      std::istringstream f(line.substr(8));
      std::string word;
      f >> slope >> word >> expected;
      continue;
    }
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "ok");
    const double eps = std::stod(line.substr(line.find(',') + 1));
    CHECK(eps > prev);
    prev = eps;
  }
  CHECK(rows == 6);
  CHECK(expected == doctest::Approx(2.5 * 6 / 7));
  CHECK(slope == doctest::Approx(expected).epsilon(0.15));

  CHECK(run({"sweep", "--config", cfg, "--tau-min", "0.01", "--tau-max", "0.001", "--out",
             (t.path / "c").string()}) == 2);
}

TEST_CASE("balance on an equally spaced chain") {
  TempDir t("cmcglue_balance_test");
  const std::string cfg = write(
      t.path / "b.cfg", "construction = two_geodesic\nalpha = 0.31\nN = 10\nm = 1\nresolution = 8\n");
  run({"balance", "--config", cfg, "--out", t.path.string()});
  const auto j = nlohmann::json::parse(slurp(t.path / "balance.json"));
  for (const auto& b : j["B"]) CHECK(std::abs(b.get<double>()) <= 1e-8);
  CHECK(j["invertible"] == true);

  // Displacements give a nonzero map whose sign follows the eps_bar differences.
  const std::string moved = write(t.path / "m.cfg", "construction = two_geodesic\nalpha = 0.31\nN = 10\n"
                                                    "m = 1\nresolution = 8\nsigma = 3e-4, -2e-4\n");
  run({"balance", "--config", moved, "--out", (t.path / "m").string()});
  const auto k = nlohmann::json::parse(slurp(t.path / "m" / "balance.json"));
  const auto& flux = k["flux_per_neck"];
  for (std::size_t i = 0; i < k["B"].size(); ++i) {
    const double b = k["B"][i].get<double>();
    CHECK(std::abs(b) > 1e-12);
    CHECK((b > 0) == (flux[i + 1].get<double>() > flux[i].get<double>()));
  }
  CHECK(run({"balance", "--config", write(t.path / "d.cfg", kDelaunay), "--out", t.path.string()}) == 2);
}
