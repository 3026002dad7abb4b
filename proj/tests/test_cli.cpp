#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "afrit/frit.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(AFRIT_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("afrit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("run on the bundled matched scenario") {
  const auto dir = scratch("run");
  const auto r = run(std::string("run ") + AFRIT_SCENARIO_DIR + "/matched_lti.json --out " + dir.string());
  REQUIRE(r.code == 0);
  const auto summary = read_json(dir / "matched_lti_summary.json");
  CHECK(summary["aggregate"]["mae"]["max"].get<double>() < 1e-3);
  CHECK(fs::exists(dir / "matched_lti_seed1.csv"));
  std::ifstream csv(dir / "matched_lti_seed1.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "k,t,r,y,u,e,ehat,kp,ki,kd,pmin,pmax,deadzone");
  fs::remove_all(dir);
}

TEST_CASE("run --seed overrides the trial list and --format json prints the summary") {
  const auto dir = scratch("seed");
  const auto r = run(std::string("run ") + AFRIT_SCENARIO_DIR + "/matched_lti.json --seed 42 --format json --out " +
                     dir.string());
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["trials"].size() == 1);
  CHECK(j["trials"][0]["seed"].get<int>() == 42);
  CHECK(fs::exists(dir / "matched_lti_seed42.csv"));
  fs::remove_all(dir);
}

TEST_CASE("tune recovers known gains from consistent regression data") {
  // y0 = G_m w and u0 = C(theta*)(w - y0) make theta* the exact FRIT optimum.
  const double kp = 0.4321, ki = 0.2468, kd = 0.01357, ts = 0.01;
  const auto gm = afrit::ReferenceModel::nominal();
  std::mt19937_64 rng(61);
  std::normal_distribution<double> nd;
  afrit::ClosedLoopDataset d;
  d.ts = ts;
  double level = 0.0, x = 0.0, y = 0.0, integ = 0.0, prev = 0.0;
  for (int k = 0; k < 3000; ++k) {
    if (k % 50 == 0) level = nd(rng);
    x = 0.95 * x + 0.05 * level;
    const double w = x;
    const double err = w - y;
    integ += ts * err;
    d.r.push_back(w);
    d.y0.push_back(y);
    d.u0.push_back(kp * err + ki * integ + kd * (err - prev) / ts);
    prev = err;
    y = 0.99 * y + 0.0095 * w;  // G_m w, one step ahead
  }
  const auto dir = scratch("tune");
  afrit::write_dataset_csv(dir / "data.csv", d);
  const auto r = run("tune " + (dir / "data.csv").string() + " --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["kp"].get<double>() == doctest::Approx(kp).epsilon(1e-4));
  CHECK(j["ki"].get<double>() == doctest::Approx(ki).epsilon(1e-4));
  CHECK(j["kd"].get<double>() == doctest::Approx(kd).epsilon(1e-4));

  const auto csv = run("tune " + (dir / "data.csv").string());
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("kp,ki,kd,frit_cost\n0.4321", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with 2") {
  const auto dir = scratch("bad");
  std::ofstream(dir / "neg.json") << R"({"duration": -5})";
  CHECK(run("run " + (dir / "neg.json").string() + " --out " + dir.string()).code == 2);
  std::ofstream(dir / "zero.json") << R"({"duration": 0})";
  CHECK(run("run " + (dir / "zero.json").string() + " --out " + dir.string()).code == 2);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK(run("run " + (dir / "broken.json").string()).code == 2);
  CHECK(run("run " + (dir / "missing.json").string()).code == 2);
  CHECK(run("run").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("run x.json --format xml").code == 2);
  fs::remove_all(dir);
}

TEST_CASE("numerical breakdown exits with 3") {
  const auto dir = scratch("nb");
  std::ofstream(dir / "unstable.json")
      << R"({"duration": 10, "reference": {"kind": "constant", "offset": 1},
             "estimator": {"method": "fixed", "theta0": [1000, 0, 0]}, "trials": 1})";
  CHECK(run("run " + (dir / "unstable.json").string() + " --out " + dir.string()).code == 3);

  afrit::ClosedLoopDataset zero{std::vector<double>(100, 0.0), std::vector<double>(100, 0.0),
                                std::vector<double>(100, 0.0), 0.01};
  afrit::write_dataset_csv(dir / "flat.csv", zero);
  CHECK(run("tune " + (dir / "flat.csv").string()).code == 3);
  fs::remove_all(dir);
}

TEST_CASE("sweep and compare produce well-formed tables") {
  const auto dir = scratch("tables");
  std::ofstream(dir / "s.json") << R"({"name": "s", "duration": 5, "reference": {"kind": "constant", "offset": 1},
      "estimator": {"theta0": [0.5, 1.0, 0.0]}, "plant": {"kind": "lti", "num": [0, 0.1], "den": [1, -0.9]},
      "trials": 2, "evaluation_window": [0, 5]})";
  const auto sw = run("sweep " + (dir / "s.json").string() + " --mu 0.9 0.8 --format json --out " + dir.string());
  REQUIRE(sw.code == 0);
  const auto t = nlohmann::json::parse(sw.out);
  REQUIRE(t.size() == 2);
  CHECK(t[1]["mu"].get<double>() == 0.8);
  CHECK(fs::exists(dir / "s_sweep_table.csv"));

  const auto cmp = run("compare " + (dir / "s.json").string() + " --seed 3");
  REQUIRE(cmp.code == 0);
  CHECK(std::count(cmp.out.begin(), cmp.out.end(), '\n') == 6);

  const auto sub = dir / "many";
  fs::create_directories(sub);
  fs::copy_file(dir / "s.json", sub / "a.json");
  fs::copy_file(dir / "s.json", sub / "b.json");
  const auto many = run("compare " + sub.string() + " --format json");
  REQUIRE(many.code == 0);
  CHECK(nlohmann::json::parse(many.out).size() == 2);
  fs::remove_all(dir);
}
