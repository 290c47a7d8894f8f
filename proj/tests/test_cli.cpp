#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "udn/report.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_udn(const std::string& args) {
  const std::string cmd = std::string(UDN_BINARY) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("bounds") {
  Run r = run_udn("bounds -K 2 -g 1 -h 1 --mu 1 --json");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["ratio"].get<double>() == doctest::Approx(28.854).epsilon(1e-4));
  CHECK(j["regime"] == "intermediate");

  r = run_udn("bounds -K 2 -g 1 -h 0.1 --json");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["regime"] == "MAC-limited");

  r = run_udn("bounds -K 3 -g 1 -h 1 --mu1 1,1.1,0.9 --mu2 1,1,1 --json");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["P2"].size() == 3);

  CHECK(run_udn("bounds -K 2 -g 1 -h 1 --mu1 1,1,1").code == 2);
  CHECK(run_udn("bounds -K 2 -g 0 -h 1").code == 2);
  CHECK(run_udn("bounds -K 2 -g 1").code == 2);
  CHECK(run_udn("bounds -K 2 -g 1 -h 1").out.find("regime") != std::string::npos);
  CHECK(run_udn("bounds --help").code == 0);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_udn("simulate --config missing.json").code == 2);
  CHECK(run_udn("simulate --network.bogus 1").code == 2);
  CHECK(run_udn("simulate --trials 0 --network.N 8 --network.Nprime 4 --codebook.M 4").code == 2);
  CHECK(run_udn("frobnicate").code == 2);
  CHECK(run_udn("").code == 2);
  CHECK(run_udn("sweep --out /tmp/udn_cli_nogrid").code == 2);
  CHECK(run_udn("verify --level extreme").code == 2);
}

TEST_CASE("simulate writes results and prints pure JSON") {
  const fs::path out = scratch("udn_cli_sim");
  const std::string args = "simulate --network.N 16 --network.Nprime 64 --network.sigma2 0.1 "
                           "--codebook.M 32 --trials 30 --json --out " + out.string();
  const Run r = run_udn(args);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["trials"] == 30);
  CHECK(j["M"] == 32);
  CHECK(fs::exists(out / "result.csv"));
  CHECK(fs::exists(out / "result.json"));
  CHECK(fs::exists(out / "details.json"));
  CHECK(run_udn(args + " --seed 1").out == r.out);
  CHECK(run_udn(args + " --seed 2").out != r.out);
  fs::remove_all(out);
}

TEST_CASE("sweep output round-trips through the CSV reader") {
  const fs::path out = scratch("udn_cli_sweep");
  const Run r = run_udn("sweep --config " UDN_SOURCE_DIR "/configs/sweep_regimes.json --sweep.K 2,4 "
                    "--sweep.sigma2 0.05,3 --trials 10 --out " + out.string());
  REQUIRE(r.code == 0);
  std::ifstream csv(out / "sweep.csv");
  const auto rows = udn::read_csv(csv);
  REQUIRE(rows.size() == 2 * 5 * 2);
  int failed = 0;
  for (const auto& row : rows) {
    if (std::isnan(row.bler)) {
      ++failed;
      continue;
    }
    CHECK(row.rpue_achieved >= 0.0);
    CHECK(row.rpue_achieved <= row.rpue_ub);
  }
  CHECK(failed == 10);  // sigma2 = 3 is not realisable by the three-point law
  const auto failures = nlohmann::json::parse(std::ifstream(out / "sweep_failures.json"));
  CHECK(failures.size() == 10);
  const auto json_rows = nlohmann::json::parse(std::ifstream(out / "sweep.json"));
  CHECK(json_rows.size() == rows.size());
  fs::remove_all(out);
}

TEST_CASE("verify exit status reflects the report") {
  const Run r = run_udn("verify --level quick");
  const bool any_fail = r.out.find("FAIL") != std::string::npos;
  CHECK(r.code == (any_fail ? 1 : 0));
  for (int id : {1, 2, 4, 5, 6, 7, 10}) {
    CHECK_MESSAGE(r.out.find("PASS [" + std::to_string(id) + "]") != std::string::npos, id);
  }
  const Run j = run_udn("verify --level quick --json");
  const auto report = nlohmann::json::parse(j.out);
  CHECK(report.size() >= 10);
  CHECK(j.code == r.code);
}
