#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "anosov/commands.hpp"

using namespace anosov;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("anosovlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json terminator_doc() {
  return {{"surface", {{"type", "constant"}, {"K", 1.0}}},
          {"T_max", 20.0},
          {"n_dir", 4},
          {"n_closed", 0},
          {"n_random", 2},
          {"random_length", 5.0},
          {"seed", 7}};
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(ANOSOVLAB_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config hash") {
  const json a = {{"x", 1}, {"y", "z"}};
  CHECK(config_hash(a) == config_hash(json::parse(a.dump())));
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) != config_hash({{"x", 2}, {"y", "z"}}));

  // 64-bit FNV-1a over the compact dump; "a" hashes to af63dc4c8601ec8c
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(a.dump())));
  CHECK(config_hash(a) == buf);

  // output location and worker count are not part of the hash, the seed is
  const RunConfig c1 = make_config(a, 3, 1, "/tmp/a");
  const RunConfig c2 = make_config(a, 3, 4, "/tmp/b");
  CHECK(c1.hash == c2.hash);
  CHECK(c1.hash != make_config(a, 4, 1, "/tmp/a").hash);
  CHECK(c1.seed == 3);
  CHECK(c1.workers == 1);
  CHECK(c2.out_dir == "/tmp/b");
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(make_config(json::array()), ConfigError);
  CHECK_THROWS_AS(make_config({{"seed", -2}}), ConfigError);
  CHECK_THROWS_AS(make_config({{"workers", -1}}), ConfigError);
  CHECK_THROWS_AS(make_config({{"seed", "one"}}), ConfigError);

  const RunConfig c = make_config({{"tol", 0.0}, {"neg", -1.0}, {"s", 3}, {"n", 2.5}});
  CHECK_THROWS_AS(c.tolerance("tol", 1), ConfigError);
  CHECK_THROWS_AS(c.tolerance("neg", 1), ConfigError);
  CHECK(c.tolerance("absent", 0.25) == 0.25);
  CHECK_THROWS_AS(c.str("s", ""), ConfigError);
  CHECK_THROWS_AS(c.integer("n", 0), ConfigError);
  CHECK(c.num("n", 0) == 2.5);

  try {
    make_config(json::array());
    FAIL("no throw");
  } catch (const ToolError& e) {
    CHECK(e.code == 2);
  }
  CHECK(InsufficientData("x").code == 3);
  CHECK(SolverFailure("x").code == 4);

  const fs::path dir = scratch("badjson");
  std::ofstream(dir / "c.json") << "{ not json";
  CHECK_THROWS_AS(load_config((dir / "c.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("surface specs") {
  CHECK(std::holds_alternative<FuchsianOctagon>(parse_surface({{"type", "octagon"}})));
  const auto k = parse_surface({{"type", "constant"}, {"K", -1.0}});
  REQUIRE(std::holds_alternative<ConstantCurvature>(k));
  CHECK(std::get<ConstantCurvature>(k).K0 == -1);

  const json torus = {{"type", "conformal_torus"}, {"Lx", 2.0}, {"Ly", 3.0}, {"nx", 8}, {"ny", 6},
                      {"lambda", "0.1*cos(2*pi*x/Lx)"}};
  const auto t = parse_surface(torus);
  REQUIRE(std::holds_alternative<ConformalTorus>(t));
  CHECK(std::get<ConformalTorus>(t).lambda()[1] == doctest::Approx(0.1 * std::cos(2 * M_PI * 0.25 / 2)));

  for (const json& bad : {json{{"type", "sphere"}}, json{{"K", 1}}, json{{"type", "constant"}},
                          json{{"type", "constant"}, {"K", "one"}},
                          json{{"type", "conformal_torus"}, {"Lx", -1}, {"Ly", 1}, {"nx", 8}, {"ny", 8}},
                          json{{"type", "conformal_torus"}, {"Lx", 1}, {"Ly", 1}, {"nx", 3}, {"ny", 8}},
                          json{{"type", "conformal_torus"}, {"Lx", 1}, {"Ly", 1}, {"nx", 8.5}, {"ny", 8}},
                          json{{"type", "conformal_torus"}, {"Lx", 1}, {"Ly", 1}, {"nx", 4}, {"ny", 4},
                               {"lambda", "x +* y"}},
                          json{{"type", "conformal_torus"}, {"Lx", 1}, {"Ly", 1}, {"nx", 4}, {"ny", 4},
                               {"lambda", json::array({json::array({1, 2, 3, 4})})}}}) {
    INFO(bad.dump());
    CHECK_THROWS_AS(parse_surface(bad), ConfigError);
  }
}

TEST_CASE("command errors map to exit classes") {
  const fs::path dir = scratch("errors");
  json doc = {{"out", dir.string()}, {"beta_target", 2.05}};
  CHECK_THROWS_AS(run_command("gulliver", make_config(doc)), ConfigError);
  doc["beta_target"] = "big";
  CHECK_THROWS_AS(run_command("gulliver", make_config(doc)), ConfigError);
  CHECK_THROWS_AS(run_command("frobnicate", make_config(doc)), ConfigError);
  CHECK_THROWS_AS(run_command("terminator", make_config({{"out", dir.string()}})), ConfigError);

  json empty = terminator_doc();
  empty["out"] = dir.string();
  empty["n_dir"] = 0;
  empty["n_random"] = 0;
  CHECK_THROWS_AS(run_command("terminator", make_config(empty)), InsufficientData);

  json xr = {{"out", dir.string()}, {"surface", {{"type", "constant"}, {"K", -1.0}}}};
  CHECK_THROWS_AS(run_command("xray", make_config(xr)), ConfigError);
  xr["surface"] = {{"type", "octagon"}};
  xr["m"] = 5;
  CHECK_THROWS_AS(run_command("xray", make_config(xr)), ConfigError);
}

TEST_CASE("runs are reproducible and stamped") {
  const fs::path d1 = scratch("rep1"), d2 = scratch("rep2"), d3 = scratch("rep3");
  json doc = terminator_doc();
  const RunConfig c1 = make_config(doc, -1, 1, d1.string());
  const RunConfig c2 = make_config(doc, -1, 1, d2.string());
  const json r1 = run_command("terminator", c1);
  const json r2 = run_command("terminator", c2);
  CHECK(r1 == r2);
  CHECK(r1["config_hash"] == c1.hash);
  CHECK(r1["version"] == kToolVersion);
  for (const char* f : {"certificate.json", "evidence.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(d1 / f));
    CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  const json cert = json::parse(slurp(d1 / "certificate.json"));
  CHECK(cert["config_hash"] == c1.hash);
  const std::string csv = slurp(d1 / "evidence.csv");
  CHECK(csv.rfind("# config_hash=" + c1.hash + " version=" + kToolVersion + "\n", 0) == 0);
  CHECK(csv.find("\nbeta,profile,first_conjugate_time\n") != std::string::npos);

  // a different seed changes the hash
  const RunConfig c3 = make_config(doc, 8, 1, d3.string());
  const json r3 = run_command("terminator", c3);
  CHECK(r3["config_hash"] != r1["config_hash"]);
}

TEST_CASE("torus w1 extension: solvable and inconsistent truncations") {
  json doc = {{"surface",
               {{"type", "conformal_torus"}, {"Lx", 6.283185307179586}, {"Ly", 6.283185307179586},
                {"nx", 8}, {"ny", 8}, {"lambda", "0.2*cos(x) + 0.1*sin(2*y)"}}},
              {"variant", "w1"},
              {"N_modes", 12}};
  const fs::path ok_dir = scratch("w1ok");
  const json rep = run_command("invariant", make_config(doc, -1, 1, ok_dir.string()));
  CHECK(rep["ok"] == true);
  CHECK(rep["interior_residual"].get<double>() < 1e-6);
  CHECK(rep["prescribed_error"].get<double>() < 1e-12);

  // the extra cos(x - y) term leaves no exact solution at this truncation
  doc["surface"]["lambda"] = "0.2*cos(x) + 0.1*sin(2*y) + 0.05*cos(x - y)";
  doc["N_modes"] = 6;
  const fs::path bad_dir = scratch("w1bad");
  CHECK_THROWS_AS(run_command("invariant", make_config(doc, -1, 1, bad_dir.string())), SolverFailure);
  // diagnostics are written before the failure is raised
  REQUIRE(fs::exists(bad_dir / "diagnostics.json"));
  const json d = json::parse(slurp(bad_dir / "diagnostics.json"));
  CHECK(d["ok"] == false);
  CHECK(d["solver_residual"].get<double>() > 1e-6);
  CHECK(d.contains("config_hash"));

  doc["surface"]["nx"] = 64;
  doc["surface"]["ny"] = 64;
  CHECK_THROWS_AS(run_command("invariant", make_config(doc, -1, 1, bad_dir.string())), ConfigError);
}

TEST_CASE("tool exit codes") {
  const fs::path dir = scratch("tool");
  CHECK(run_tool("--version") == 0);
  CHECK(run_tool("") == 2);
  CHECK(run_tool("pestov") == 2);
  CHECK(run_tool("nonsense --config x.json") == 2);
  CHECK(run_tool("terminator --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_tool("terminator --config x.json --seed -3") == 2);

  json doc = terminator_doc();
  std::ofstream(dir / "t.json") << doc.dump();
  CHECK(run_tool("terminator --config " + (dir / "t.json").string() + " --out " + (dir / "o").string()) == 0);
  CHECK(fs::exists(dir / "o" / "certificate.json"));

  doc["n_dir"] = 0;
  doc["n_random"] = 0;
  std::ofstream(dir / "e.json") << doc.dump();
  CHECK(run_tool("terminator --config " + (dir / "e.json").string() + " --out " + (dir / "o").string()) == 3);

  std::ofstream(dir / "g.json") << json{{"beta_target", 2.5}}.dump();
  CHECK(run_tool("gulliver --config " + (dir / "g.json").string() + " --out " + (dir / "o").string()) == 2);
}
