#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fracspec/grid.hpp"

using namespace fracspec;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const std::filesystem::path& work_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() / "fracspec_cli_test";
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string wpath(const std::string& name) {
  return (work_dir() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  RunResult r;
  const std::string errfile = wpath("stderr.txt");
  const std::string cmd =
      std::string(FRACSPEC_CLI_PATH) + " " + args + " 2>" + errfile;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(errfile);
  return r;
}

// sampled bump on (0, pi) with trapezoid weights
const std::string& bump_csv() {
  static const std::string path = [] {
    GridFunction g;
    g.dim = 1;
    const int n = 800;
    const double h = kPi / n;
    for (int i = 1; i < n; ++i) {
      const double x = i * h;
      const double u = (x - 1.6) / 0.8;
      g.coords.push_back(x);
      g.values.push_back(std::abs(u) < 1.0
                             ? std::exp(-u * u / (1.0 - u * u))
                             : 0.0);
      g.weights.push_back(h);
    }
    const auto p = wpath("bump.csv");
    write_csv(g, p);
    return p;
  }();
  return path;
}

std::string dirichlet_args() {
  return "--system dirichlet --modes 24 --lo 0 --hi 3.141592653589793";
}

}  // namespace

TEST_CASE("catalog lists systems and maps as JSON") {
  const auto r = run_cli("catalog");
  CHECK(r.exit_code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc.at("quantity") == "catalog");
  REQUIRE(doc.contains("systems"));
  REQUIRE(doc.contains("transference_maps"));
  CHECK(doc["systems"].size() >= 10);
  bool saw_dirichlet = false;
  for (const auto& s : doc["systems"])
    if (s.at("name") == "dirichlet") saw_dirichlet = true;
  CHECK(saw_dirichlet);
  CHECK(doc["transference_maps"].size() == 8);
}

TEST_CASE("analyze expands samples and reports the Parseval defect") {
  const auto out = wpath("coef.csv");
  const auto rep = wpath("analyze.json");
  const auto r = run_cli("analyze " + dirichlet_args() + " --input " +
                         bump_csv() + " --output " + out + " --report " +
                         rep);
  CHECK(r.exit_code == 0);
  const auto doc = json::parse(slurp(rep));
  CHECK(doc.at("quantity") == "coefficients");
  CHECK(doc.at("modes") == 24);
  CHECK(doc.at("parseval_defect").get<double>() < 1e-3);
  CHECK(doc.at("config").at("system").at("name") == "dirichlet");

  std::ifstream is(out);
  std::string header;
  std::getline(is, header);
  CHECK(header.substr(0, 21) == "k1,lambda,coefficient");
  std::size_t rows = 0;
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line != "\r") ++rows;
  CHECK(rows == 24);
}

TEST_CASE("the two fractional routes agree through the CLI") {
  const auto spec_out = wpath("spec.csv");
  const auto bala_out = wpath("bala.csv");
  const auto base = "frac-apply " + dirichlet_args() +
                    " --sigma 0.5 --input " + bump_csv();
  CHECK(run_cli(base + " --route spectral --output " + spec_out).exit_code ==
        0);
  CHECK(run_cli(base + " --route balakrishnan --output " + bala_out)
            .exit_code == 0);

  const auto a = read_csv(spec_out);
  const auto b = read_csv(bala_out);
  REQUIRE(a.size() == b.size());
  double sup = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    sup = std::max(sup, std::abs(a.values[p] - b.values[p]));
    scale = std::max(scale, std::abs(a.values[p]));
  }
  CHECK(scale > 0.0);
  CHECK(sup <= 1e-9 * scale);
}

TEST_CASE("reruns write byte-identical artifacts") {
  const auto out1 = wpath("rerun1.csv");
  const auto out2 = wpath("rerun2.csv");
  const auto rep1 = wpath("rerun1.json");
  const auto rep2 = wpath("rerun2.json");
  const auto base = "frac-apply " + dirichlet_args() +
                    " --sigma 0.3 --route spectral --input " + bump_csv();
  CHECK(run_cli(base + " --output " + out1 + " --report " + rep1).exit_code ==
        0);
  CHECK(run_cli(base + " --output " + out2 + " --report " + rep2).exit_code ==
        0);
  const auto c1 = slurp(out1);
  CHECK(!c1.empty());
  CHECK(c1 == slurp(out2));
  // reports only differ where they echo the output path
  auto j1 = json::parse(slurp(rep1));
  auto j2 = json::parse(slurp(rep2));
  j1.erase("samples_csv");
  j2.erase("samples_csv");
  CHECK(j1 == j2);
}

TEST_CASE("trace compares the ladder against the spectral route") {
  const auto rep = wpath("trace.json");
  const auto base = "trace " + dirichlet_args() + " --sigma 0.5 --input " +
                    bump_csv() + " --report " + rep;
  const auto ok = run_cli(base);
  CHECK(ok.exit_code == 0);
  const auto doc = json::parse(slurp(rep));
  CHECK(doc.at("quantity") == "neumann_trace");
  CHECK(doc.at("max_relative_gap").get<double>() < 1e-6);

  // an unreachable tolerance turns into a numeric failure, exit 3
  const auto bad = run_cli(base + " --tol 1e-18");
  CHECK(bad.exit_code == 3);
  const auto err = json::parse(bad.err);
  CHECK(err.at("error").at("kind") == "numeric");
}

TEST_CASE("harnack surveys are reproducible byte for byte") {
  const auto args =
      "harnack --system dirichlet --modes 96 --lo 0 --hi 3.141592653589793"
      " --sigma 0.5 --trials 6 --seed 3 --scan 120 --o-lo 1 --o-hi 2"
      " --k-lo 1.25 --k-hi 1.75 --gen-lo 2.3 --gen-hi 3.0";
  const auto rep1 = wpath("h1.json");
  const auto rep2 = wpath("h2.json");
  const auto csv1 = wpath("h1.csv");
  const auto csv2 = wpath("h2.csv");
  CHECK(run_cli(std::string(args) + " --report " + rep1 + " --csv " + csv1)
            .exit_code == 0);
  CHECK(run_cli(std::string(args) + " --report " + rep2 + " --csv " + csv2)
            .exit_code == 0);

  const auto doc = json::parse(slurp(rep1));
  const auto& st = doc.at("statistics");
  CHECK(st.at("accepted").get<int>() +
            st.at("excluded_support").get<int>() +
            st.at("excluded_negative").get<int>() +
            st.at("excluded_residual").get<int>() +
            st.at("excluded_unbounded").get<int>() ==
        6);
  CHECK(st.at("accepted").get<int>() > 0);
  CHECK(std::isfinite(st.at("c_emp").get<double>()));
  CHECK(st.at("quartile1").get<double>() <= st.at("median").get<double>());
  CHECK(st.at("median").get<double>() <= st.at("quartile3").get<double>());

  // statistics payloads and per-trial tables are byte-identical
  auto j1 = json::parse(slurp(rep1));
  auto j2 = json::parse(slurp(rep2));
  CHECK(j1.at("statistics") == j2.at("statistics"));
  CHECK(slurp(csv1) == slurp(csv2));
}

TEST_CASE("config files set defaults and flags override them") {
  const auto conf = wpath("conf.json");
  std::ofstream(conf) << R"({"sigma": 0.25, "trials": 7})";
  const auto rep = wpath("conf_echo.json");
  const auto r = run_cli(
      "--config " + conf +
      " harnack --system dirichlet --modes 96 --lo 0 --hi 3.141592653589793"
      " --sigma 0.75 --seed 3 --scan 120 --o-lo 1 --o-hi 2 --k-lo 1.25"
      " --k-hi 1.75 --gen-lo 2.3 --gen-hi 3.0 --report " +
      rep);
  CHECK(r.exit_code == 0);
  const auto doc = json::parse(slurp(rep));
  CHECK(doc.at("config").at("sigma").get<double>() == 0.75);
  CHECK(doc.at("config").at("trials").get<int>() == 7);
}

TEST_CASE("configuration errors exit with status 2 and a JSON reason") {
  const auto cases = {
      std::string("analyze --system nosuch --input ") + bump_csv(),
      "frac-apply " + dirichlet_args() + " --sigma 1.5 --input " +
          bump_csv(),
      "trace " + dirichlet_args() + " --sigma 0.5",
      "analyze " + dirichlet_args() + " --input " + bump_csv() +
          " --output /nonexistent_dir_fracspec/x.csv",
  };
  for (const auto& args : cases) {
    CAPTURE(args);
    const auto r = run_cli(args);
    CHECK(r.exit_code == 2);
    const auto err = json::parse(r.err);
    CHECK(err.at("error").at("kind") == "config");
    CHECK(!err.at("error").at("message").get<std::string>().empty());
  }

  const auto badconf = wpath("badconf.json");
  std::ofstream(badconf) << R"({"nonsense_key": 1})";
  const auto r = run_cli("--config " + badconf + " catalog");
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.err).at("error").at("kind") == "config");
}

TEST_CASE("verification suites run through the CLI") {
  const auto rep = wpath("verify.json");
  const auto r = run_cli("verify --suite multiplier --report " + rep);
  CHECK(r.exit_code == 0);
  const auto doc = json::parse(slurp(rep));
  CHECK(doc.at("quantity") == "verify_suite");
  const auto& suite = doc.at("suites").at("multiplier");
  REQUIRE(suite.is_array());
  REQUIRE(!suite.empty());
  CHECK(suite[0].at("pass").get<bool>());
}
