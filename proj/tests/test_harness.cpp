#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "udn/harness.hpp"
#include "verify/oracles.hpp"

using namespace udn;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.network = NetworkConfig::symmetric(2, 1.0, 1.0, 1.0, 0.1, 32, 64, 1.0, 1.0);
  spec.codebook.messages = 64;
  spec.trials = 60;
  spec.threads = 2;
  return spec;
}

}  // namespace

TEST_CASE("noiseless distinct codewords never fail") {
  ExperimentSpec spec;
  spec.network = NetworkConfig::symmetric(1, 1.0, 1.0, 1.0, 0.0, 8, 4, 1.0, 1.0);
  spec.network.noise = false;
  spec.codebook.messages = 2;
  spec.trials = 50;
  const ExperimentResult r = run_experiment(spec);
  CHECK(r.block_errors == 0);
  CHECK(r.bler.estimate == 0.0);
  CHECK(r.bler.hi == doctest::Approx(3.0 / 50));
}

TEST_CASE("equal seeds give byte-identical results for any thread count") {
  ExperimentSpec spec = small_spec();
  const std::string a = to_json(run_experiment(spec));
  CHECK(a == to_json(run_experiment(spec)));
  spec.threads = 1;
  CHECK(a == to_json(run_experiment(spec)));
  spec.threads = 5;
  CHECK(a == to_json(run_experiment(spec)));
  spec.network.seed = 2;
  CHECK(a != to_json(run_experiment(spec)));
  CHECK(a.find("wall") == std::string::npos);
}

TEST_CASE("proportion interval") {
  ProportionInterval ci = proportion_interval(10, 100);
  CHECK(ci.estimate == 0.1);
  CHECK(ci.lo == doctest::Approx(0.1 - 1.96 * std::sqrt(0.09 / 100)));
  CHECK(ci.hi == doctest::Approx(0.1 + 1.96 * std::sqrt(0.09 / 100)));
  ci = proportion_interval(0, 1000);
  CHECK(ci.lo == 0.0);
  CHECK(ci.hi == doctest::Approx(0.003));
  ci = proportion_interval(20, 20);
  CHECK(ci.hi == 1.0);
  CHECK(ci.lo == doctest::Approx(1.0 - 3.0 / 20));
  ci = proportion_interval(1, 2);
  CHECK(ci.lo == 0.0);
  CHECK(ci.hi == 1.0);
  CHECK_THROWS_AS(proportion_interval(0, 0), UsageError);
}

TEST_CASE("rate matching") {
  const double gamma = gamma_constant().value;
  CHECK(rate_matched_log2m(0.8, 0.4, 256) == static_cast<int>(std::floor(0.8 * gamma * awgn_capacity(0.4) * 256)));
  CHECK(rate_matched_log2m(0.8, 0.4, 256, true) == rate_matched_log2m(0.8, 0.4, 256) + 1);

  ExperimentSpec spec = small_spec();
  spec.codebook.messages = 0;
  spec.resolve();
  const double snr = snr_lb(spec.network.source_power, spec.network.relay_power.front(), 2, 1, 1, 1);
  CHECK(resolve_messages(spec) == (std::uint64_t{1} << rate_matched_log2m(0.8, snr, 32)));
}

TEST_CASE("resolve applies powers and margins") {
  ExperimentSpec spec = small_spec();
  spec.network.g = 1.0;
  spec.network.h = 0.1;
  spec.resolve();
  CHECK(spec.network.source_power == doctest::Approx(1.0));
  CHECK(spec.network.relay_power == std::vector<double>{2.5, 2.5});
  CHECK(spec.network.margins.nu == doctest::Approx(4.0 * std::sqrt(32 * 64 * 0.1)));
  spec.margin_preset = MarginPreset::paper;
  spec.resolve();
  CHECK(spec.network.margins.beta == doctest::Approx(32768.0));
  CHECK(parse_margin_preset("custom") == MarginPreset::custom);
  CHECK_THROWS_AS(parse_margin_preset("loose"), ConfigError);
}

TEST_CASE("pre-flight refuses infeasible memory") {
  ExperimentSpec spec = small_spec();
  spec.codebook.messages = std::uint64_t{1} << 40;
  CHECK_THROWS_WITH_AS(run_experiment(spec), doctest::Contains("pre-flight"), UsageError);
  spec.codebook.messages = 64;
  spec.network.repetitions = std::int64_t{1} << 36;
  CHECK_THROWS_AS(run_experiment(spec), UsageError);
  spec = small_spec();
  spec.trials = 0;
  CHECK_THROWS_AS(run_experiment(spec), UsageError);
  CHECK(estimate_memory_bytes(small_spec(), 64) > codebook_bytes(64, 32));
}

TEST_CASE("result bookkeeping") {
  ExperimentSpec spec = small_spec();
  spec.reference_decoder = [](const OuterCodebook& cb, const Eigen::VectorXd& y) {
    return oracle::brute_force_decode(cb, y);
  };
  const ExperimentResult r = run_experiment(spec);
  spec.resolve();
  const NetworkConfig& cfg = spec.network;
  CHECK(r.trials == 60);
  CHECK(r.messages == 64);
  CHECK(r.rpue_achieved ==
        std::log2(64.0) / (32.0 * (cfg.source_power + cfg.total_relay_power())));
  CHECK(r.rate_bits_per_symbol == doctest::Approx(6.0 / 32));
  CHECK(r.effective_capacity == doctest::Approx(gamma_constant().value * awgn_capacity(r.snr_lb)));
  CHECK(r.reference_agreements.value() == 60);
  CHECK(r.good_trials + r.e_idc_count == 60);
  CHECK(r.source_energy_max_deviation < 1e-10);
  CHECK(r.relay_energy_mean.size() == 2);
  CHECK(r.decomposition_residual < 1e-10);
  CHECK(r.e_idc_bound == doctest::Approx(std::min(1.0, 4 * 2 * 0.1 / 32)));
}

TEST_CASE("codebook sidecar is written and reused") {
  const auto path = std::filesystem::temp_directory_path() / "udn_harness_cb.bin";
  std::filesystem::remove(path);
  ExperimentSpec spec = small_spec();
  spec.codebook.path = path;
  const std::string first = to_json(run_experiment(spec));
  CHECK(std::filesystem::exists(path));
  CHECK(to_json(run_experiment(spec)) == first);
  spec.codebook.messages = 32;
  CHECK_THROWS_AS(run_experiment(spec), UsageError);
  std::filesystem::remove(path);
}

TEST_CASE("below-capacity operation matches an independent binary-input link") {
  // Deterministic states make the effective channel an exact AWGN channel at
  // snr_lb = 0.4, so the pipeline's error rate must match an independent
  // BPSK-AWGN simulation at the same SNR and rate.
  const Index n = 48;
  const int log2m = static_cast<int>(std::floor(0.9 * gamma_constant().value * awgn_capacity(0.4) * n));
  ExperimentSpec spec;
  spec.network = NetworkConfig::symmetric(2, 1.0, 0.1, 1.0, 0.0, n, 32, 1.0, 1.0);
  spec.codebook.messages = std::uint64_t{1} << log2m;
  spec.trials = 600;
  const ExperimentResult r = run_experiment(spec);
  CHECK(r.snr_lb == doctest::Approx(0.4));
  CHECK(r.snr_measured_mean == doctest::Approx(0.4).epsilon(0.05));
  const auto ref = oracle::bpsk_awgn_link(0.4, spec.codebook.messages, n, 600, 99);
  const double p = r.bler.estimate, q = ref.rate();
  const double se = std::sqrt(p * (1 - p) / 600 + q * (1 - q) / 600);
  CHECK(std::abs(p - q) <= 4.0 * se);
}

TEST_CASE("rate-matched codebook at N = 256 is beyond the memory budget") {
  ExperimentSpec spec;
  spec.network = NetworkConfig::symmetric(2, 1.0, 0.1, 1.0, 0.1, 256, 4096, 1.0, 1.0);
  spec.codebook.messages = std::uint64_t{1} << static_cast<int>(
      std::floor(0.9 * gamma_constant().value * awgn_capacity(0.4) * 256));
  CHECK_THROWS_WITH_AS(run_experiment(spec), doctest::Contains("pre-flight"), UsageError);
}

TEST_CASE("sweep") {
  ExperimentSpec base = small_spec();
  base.trials = 20;

  SweepGrid one{{2}, {1.0}, {1.0}, {1.0}, {0.1}, {32}};
  const auto single = sweep(base, one);
  REQUIRE(single.size() == 1);
  REQUIRE(single[0].result);
  CHECK(to_json(*single[0].result) == to_json(run_experiment(base)));
  CHECK(to_json(single[0].bounds) == to_json(bounds_report(2, 1.0, 1.0, 1.0)));

  SweepGrid hs{{4}, {1.0}, {0.05, 0.1, 0.3, 1.0, 3.0, 10.0}, {1.0}, {0.1}, {16}};
  const auto rows = sweep(base, hs);
  REQUIRE(rows.size() == 6);
  int changes = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) changes += rows[i].bounds.regime != rows[i - 1].bounds.regime;
  CHECK(changes == 2);
  CHECK(sweep_bound_violations(rows).empty());
  for (const auto& row : rows) {
    REQUIRE(row.result);
    CHECK(row.result->rpue_achieved >= 0.0);
    CHECK(row.result->rpue_achieved <= row.bounds.sync_ub);
  }

  // An infeasible point is recorded and the sweep continues.
  SweepGrid mixed{{2}, {1.0}, {1.0}, {1.0}, {0.1, 3.0}, {16}};
  const auto partial = sweep(base, mixed);
  REQUIRE(partial.size() == 2);
  CHECK(partial[0].error.empty());
  CHECK_FALSE(partial[1].error.empty());
  CHECK_FALSE(partial[1].result);

  CHECK_THROWS_AS(sweep(base, SweepGrid{}), UsageError);
}
