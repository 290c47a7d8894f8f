#include <doctest.h>

#include <fstream>

#include "udn/config.hpp"

using namespace udn;
using nlohmann::json;

TEST_CASE("defaults parse into a runnable spec") {
  const RunConfig rc = parse_config(json::object());
  CHECK(rc.spec.network.relays == 2);
  CHECK(rc.spec.network.outer_length == 256);
  CHECK(rc.spec.network.repetitions == 4096);
  CHECK(rc.spec.network.mu_first == std::vector<double>{1.0, 1.0});
  CHECK(rc.spec.network.interleaver_depth == 3);
  CHECK(rc.spec.trials == 1000);
  CHECK(rc.spec.margin_preset == MarginPreset::desk);
  CHECK_FALSE(rc.grid);
}

TEST_CASE("unknown keys are hard errors") {
  CHECK_THROWS_WITH_AS(parse_config(json{{"trails", 10}}), doctest::Contains("trails"), UsageError);
  CHECK_THROWS_WITH_AS(parse_config(json{{"network", {{"Kk", 3}}}}),
                       doctest::Contains("network.Kk"), UsageError);
  json cfg = default_config_json();
  CHECK_THROWS_AS(apply_override(cfg, "network.gain", "1"), UsageError);
  CHECK_THROWS_AS(apply_override(cfg, "network", "1"), UsageError);
  CHECK_THROWS_AS(apply_override(cfg, "trials.x", "1"), UsageError);
}

TEST_CASE("wrong types name the key") {
  CHECK_THROWS_WITH_AS(parse_config(json{{"network", {{"g", "big"}}}}),
                       doctest::Contains("network.g"), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"network", 3}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"network", {{"law", "uniform"}}}}), UsageError);
  CHECK_THROWS_AS(parse_config(json{{"margins", "loose"}}), UsageError);
}

TEST_CASE("dotted overrides") {
  json cfg = default_config_json();
  apply_override(cfg, "network.K", "4");
  apply_override(cfg, "network.mu2", "1,0.5,0.5,1");
  apply_override(cfg, "network.law", "geometric");
  apply_override(cfg, "codebook.M", "128");
  apply_override(cfg, "seed", "18446744073709551615");
  apply_override(cfg, "sweep.h", "0.1");
  const RunConfig rc = parse_config(cfg);
  CHECK(rc.spec.network.relays == 4);
  CHECK(rc.spec.network.mu_second == std::vector<double>{1, 0.5, 0.5, 1});
  CHECK(rc.spec.network.mu_first == std::vector<double>(4, 1.0));
  CHECK(rc.spec.network.law == StateLaw::geometric);
  CHECK(rc.spec.codebook.messages == 128);
  CHECK(rc.spec.network.seed == 18446744073709551615ull);
  REQUIRE(rc.grid);
  CHECK(rc.grid->h == std::vector<double>{0.1});
  CHECK(rc.grid->relays == std::vector<int>{4});
  CHECK(rc.grid->points() == 1);
}

TEST_CASE("drift lists must match K") {
  json cfg = default_config_json();
  apply_override(cfg, "network.mu1", "1,1,1");
  CHECK_THROWS_WITH_AS(parse_config(cfg), doctest::Contains("network.mu1"), UsageError);
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "udn_test_config.json";
  {
    std::ofstream out(path);
    out << R"({"network": {"K": 3, "sigma2": 0.05}, "trials": 7, "sweep": {"g": [0.1, 1]}})";
  }
  json cfg = default_config_json();
  merge_config(cfg, read_config_file(path));
  const RunConfig rc = parse_config(cfg);
  CHECK(rc.spec.network.relays == 3);
  CHECK(rc.spec.trials == 7);
  REQUIRE(rc.grid);
  CHECK(rc.grid->points() == 2);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(read_config_file(path), UsageError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_config_file(path), UsageError);
}

TEST_CASE("shipped configs and schema agree with the parser") {
  const std::filesystem::path dir = UDN_SOURCE_DIR "/configs";
  const json schema = read_config_file(dir / "schema.json");
  const json defaults = default_config_json();
  for (const auto& [key, value] : defaults.items()) {
    CHECK_MESSAGE(schema["properties"].contains(key), key);
    if (value.is_object()) {
      for (const auto& [sub, unused] : value.items()) {
        const std::string dotted = key + "." + sub;
        CHECK_MESSAGE(schema["properties"][key]["properties"].contains(sub), dotted);
      }
    }
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().filename() == "schema.json") continue;
    CHECK_NOTHROW(parse_config(read_config_file(entry.path())));
  }
}
