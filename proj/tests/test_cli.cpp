#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "oqrw/io.hpp"
#include "support.hpp"

#ifndef OQRW_CLI_PATH
#define OQRW_CLI_PATH "oqrw"
#endif

namespace fs = std::filesystem;
using namespace oqrw;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oqrw_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Result cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / ("oqrw_cli_log_" + std::to_string(::getpid()));
  const std::string cmd = std::string(OQRW_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = io::read_file(log);
  fs::remove(log);
  return r;
}

std::string fx(const std::string& name) { return testing::fixture(name); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("validate exit codes") {
  CHECK(cli("validate --model " + fx("four_level_p6.json")).code == 0);
  CHECK(cli("validate --model /nonexistent.json").code == 1);
  const fs::path dir = scratch("validate");
  WalkModel bad = testing::four_level(0.0, 0.0, 0.5);
  bad.kraus[0](3, 3) = 2.0 / std::sqrt(3.0);
  io::write_file(dir / "bad.json", io::model_to_json(bad).dump());
  const Result r = cli("validate --model " + (dir / "bad.json").string());
  CHECK(r.code == 2);
  CHECK_THAT(r.out, ContainsSubstring("NotTracePreserving"));
  io::write_file(dir / "broken.json", "{\"lattice_dim\": ");
  CHECK(cli("validate --model " + (dir / "broken.json").string()).code == 1);
  CHECK(cli("validate --bogus-flag").code == 1);
  fs::remove_all(dir);
}

TEST_CASE("analyze prints the decomposition") {
  const Result r = cli("analyze --model " + fx("four_level_p6.json") + " --state " + fx("state_h4_e0.json"));
  REQUIRE(r.code == 0);
  const io::Json j = io::Json::parse(r.out);
  CHECK(j["transient"]["dim"] == 1);
  CHECK(j["recurrent"]["dim"] == 3);
  CHECK(j["blocks"].size() == 2);
  CHECK(j["blocks"][1]["weight"].get<double>() == Approx(1.0 / 3).margin(1e-9));
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::string common = "simulate --model " + fx("four_level_p6.json") + " --state " + fx("state_h4_e0.json") +
                             " --steps 0,10,30 --traj 200 --seed 42 --enclosure-track 1";
  REQUIRE(cli(common + " --out " + a.string()).code == 0);
  REQUIRE(cli(common + " --threads 3 --out " + b.string()).code == 0);
  for (const char* f : {"ensemble_n0.csv", "ensemble_n10.csv", "ensemble_n30.csv", "absorption.csv"}) {
    CHECK(io::read_file(a / f) == io::read_file(b / f));
  }
  const auto rows = lines(io::read_file(a / "ensemble_n30.csv"));
  CHECK(rows.size() == 201);
  CHECK(rows[0] == "trajectory,x0_1,x_1,Y_1");
  for (std::size_t i = 1; i < 5; ++i) CHECK_THAT(rows[i], ContainsSubstring(","));
  const io::Json manifest = io::Json::parse(io::read_file(a / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 42);
  CHECK(manifest["config"]["Y_snapshot_stride"] == 10);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("compare writes distances and rejects unknown horizons") {
  const fs::path dir = scratch("cmp");
  const std::string model = " --model " + fx("four_level_p6.json") + " --state " + fx("state_h4_e0.json");
  REQUIRE(cli("simulate" + model + " --steps 0,20 --traj 300 --seed 5 --out " + dir.string()).code == 0);
  const Result ok = cli("compare" + model + " --sim " + dir.string() + " --steps 0,20 --out " + dir.string());
  REQUIRE(ok.code == 0);
  const auto rows = lines(io::read_file(dir / "distances.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "n,N,w1,ks");
  // n = 0: X_0 is recorded for both columns, so every rescaled displacement is 0.
  const auto n0 = lines(io::read_file(dir / "ensemble_n0.csv"));
  for (std::size_t i = 1; i < n0.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream in(n0[i]);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 3);
    CHECK(cells[1] == cells[2]);
  }
  CHECK(lines(io::read_file(dir / "histogram_n0.csv")).size() == 2);
  CHECK(fs::exists(dir / "cdf_n20.csv"));
  const Result bad = cli("compare" + model + " --sim " + dir.string() + " --steps 15 --out " + dir.string());
  CHECK(bad.code == 1);
  CHECK_THAT(bad.out, ContainsSubstring("HorizonMismatch"));
  fs::remove_all(dir);
}

TEST_CASE("clt writes the mixture and its CDF") {
  const fs::path dir = scratch("clt");
  REQUIRE(cli("clt --model " + fx("four_level_p6.json") + " --state " + fx("state_h4_e0.json") +
              " --steps 50,150 --out " + dir.string())
              .code == 0);
  const io::Json j = io::Json::parse(io::read_file(dir / "clt.json"));
  CHECK(j["horizons"].size() == 2);
  CHECK(j["mixtures"][0]["components"].size() == 2);
  CHECK(fs::exists(dir / "clt_cdf_n150.csv"));
  fs::remove_all(dir);
}

TEST_CASE("ldp labels the rate records") {
  const fs::path a = scratch("ldp_exact"), b = scratch("ldp_bounds");
  REQUIRE(cli("ldp --model " + fx("commuting_d1.json") + " --state " + fx("state_h3_uniform.json") +
              " --grid -0.9:0.9:0.3 --out " + a.string())
              .code == 0);
  CHECK(io::Json::parse(io::read_file(a / "rate.json"))["label"] == "exact-LDP");
  REQUIRE(cli("ldp --model " + fx("four_level_p6.json") + " --state " + fx("state_h4_e0.json") +
              " --grid -0.5:0.5:0.25 --out " + b.string())
              .code == 0);
  const io::Json rb = io::Json::parse(io::read_file(b / "rate.json"));
  CHECK(rb["label"] == "bounds-only");
  CHECK_FALSE(rb["caveat"].get<std::string>().empty());
  CHECK(lines(io::read_file(b / "rate.csv")).size() == 6);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("two-dimensional ensembles need an axis") {
  const fs::path dir = scratch("axis");
  const std::string model = " --model " + fx("commuting_d2.json") + " --state " + fx("state_h2_uniform_2d.json");
  REQUIRE(cli("simulate" + model + " --steps 10 --traj 50 --seed 1 --out " + dir.string()).code == 0);
  const Result missing = cli("compare" + model + " --sim " + dir.string() + " --steps 10 --out " + dir.string());
  CHECK(missing.code == 1);
  CHECK_THAT(missing.out, ContainsSubstring("MissingAxis"));
  CHECK(cli("compare" + model + " --sim " + dir.string() + " --steps 10 --axis 1,1 --out " + dir.string()).code == 0);
  fs::remove_all(dir);
}
