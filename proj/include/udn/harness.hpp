#pragma once

// Monte Carlo orchestration: trials keyed by (master seed, trial index), a
// deterministic fold in trial order, parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "udn/analysis.hpp"
#include "udn/coding.hpp"
#include "udn/network.hpp"

namespace udn {

enum class MarginPreset { desk, paper, custom };

MarginPreset parse_margin_preset(std::string_view name);
std::string_view to_string(MarginPreset preset);

struct CodebookSpec {
  /// 0 selects M = 2^floor(rate_fraction * gamma * C(snr_lb) * N).
  std::uint64_t messages = 0;
  double rate_fraction = 0.8;
  std::uint64_t seed = 7;
  /// Sidecar file: loaded when it exists, written otherwise.
  std::optional<std::filesystem::path> path;
};

/// Decoder run next to ml_decode on every trial; agreements are counted.
using ReferenceDecoder = std::function<Index(const OuterCodebook&, const Eigen::VectorXd&)>;

struct ExperimentSpec {
  NetworkConfig network;
  CodebookSpec codebook;
  Index trials = 1000;

  /// When set, P1 and P2k come from select_powers (or its unequal-drift form).
  bool auto_powers = true;
  MarginPreset margin_preset = MarginPreset::desk;
  double margin_scale = 4.0;  // c in the desk preset

  unsigned threads = 0;  // 0: hardware concurrency
  double max_memory_bytes = 4.0 * 1024 * 1024 * 1024;
  ReferenceDecoder reference_decoder;

  /// Applies auto_powers and margin_preset to `network`.
  void resolve();
};

/// 95% normal-approximation interval p +/- 1.96 sqrt(p (1-p) / n), clipped to
/// [0, 1]. With zero errors the upper end is the rule-of-three bound 3/n
/// (and symmetrically when every trial fails).
struct ProportionInterval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

ProportionInterval proportion_interval(Index successes, Index trials);

/// floor (or ceil) of fraction * gamma * C(snr) * N, the log2 of the
/// rate-matched codebook size.
int rate_matched_log2m(double fraction, double snr, Index outer_length, bool round_up = false);

struct ExperimentResult {
  Index trials = 0;
  std::uint64_t messages = 0;
  Index block_errors = 0;
  ProportionInterval bler;
  Index good_trials = 0;        // no bad piece on any of the 2K channels
  Index good_block_errors = 0;
  double conditional_bler = 0.0;

  double snr_lb = 0.0;  // at the configured powers
  // Per-symbol SNR s[n]^2 / var(noise), noise variance pooled over symbols.
  // NaN when the decomposition is off.
  double snr_measured_mean = 0.0;
  double snr_measured_mean_good = 0.0;
  double snr_measured_min_good = 0.0;
  double noise_variance = 0.0;
  double noise_variance_good = 0.0;
  // Smallest sign(u[n]) * signal[n] over good trials, and the floor it should
  // clear (NaN when drifts differ).
  double min_signal_good = 0.0;
  double signal_floor = 0.0;
  double decomposition_residual = 0.0;

  double source_energy_mean = 0.0;
  double source_energy_max_deviation = 0.0;  // max |E_source - N P1|
  std::vector<double> relay_energy_mean;
  std::vector<double> relay_energy_stderr;
  double relay_over_budget_freq = 0.0;

  Index e_idc_count = 0;
  double e_idc_freq = 0.0;
  double e_idc_bound = 0.0;             // min(1, 4 K sigma2 / N)
  double e_idc_chebyshev_bound = 0.0;   // recomputed for the actual nu, beta
  double bad_piece_freq = 0.0;

  double rate_bits_per_symbol = 0.0;    // log2 M / N
  double effective_capacity = 0.0;      // gamma * C(snr_lb)
  double rpue_achieved = 0.0;           // log2 M / (N (P1 + sum_k P2k))
  double repetition_mismatch = 0.0;

  std::optional<Index> reference_agreements;
  double wall_clock_seconds = 0.0;  // not serialised
};

/// Pre-flight estimate of peak memory for the spec (codebook plus per-worker
/// working set).
double estimate_memory_bytes(const ExperimentSpec& spec, std::uint64_t messages);

/// Resolves M for the spec (explicit or rate-matched).
std::uint64_t resolve_messages(const ExperimentSpec& spec);

/// Throws UsageError when the spec is invalid or exceeds max_memory_bytes.
ExperimentResult run_experiment(ExperimentSpec spec);

/// Identical bytes for identical inputs; wall clock excluded.
std::string to_json(const ExperimentResult& result, int indent = 2);

struct SweepGrid {
  std::vector<int> relays;
  std::vector<double> g, h, mu, sigma2;
  std::vector<Index> outer_length;

  std::size_t points() const;
};

struct SweepRow {
  ExperimentSpec spec;  // as run, after resolve()
  BoundsReport bounds;
  std::optional<ExperimentResult> result;
  std::string error;  // nonempty when this point failed
};

/// Cartesian product of the grid over `base`. A failing point is recorded in
/// its row and the sweep continues.
std::vector<SweepRow> sweep(const ExperimentSpec& base, const SweepGrid& grid);

/// Rows whose achieved rate per unit energy exceeds the synchronized upper
/// bound. Must be empty.
std::vector<std::size_t> sweep_bound_violations(const std::vector<SweepRow>& rows);

}  // namespace udn
