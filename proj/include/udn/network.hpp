#pragma once

// One codeword transmission over the unsynchronized K-relay diamond network:
// source -> K first-hop IDCs -> amplify-and-forward relays -> K second-hop
// IDCs -> destination.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "udn/coding.hpp"
#include "udn/common.hpp"
#include "udn/idc.hpp"

namespace udn {

struct NetworkConfig {
  int relays = 2;  // K
  double g = 1.0;  // source-relay power gain
  double h = 1.0;  // relay-destination power gain
  std::vector<double> mu_first;   // drift of first-hop IDC k
  std::vector<double> mu_second;  // drift of second-hop IDC k
  double sigma2 = 0.0;
  StateLaw law = StateLaw::three_point;
  Index outer_length = 256;   // N
  Index repetitions = 4096;   // N' (N'_1 when drifts differ)
  double source_power = 1.0;  // P1
  std::vector<double> relay_power;  // P2k
  ConcentrationMargins margins;
  Index interleaver_depth = 3;
  std::uint64_t seed = 1;

  // When false the channel noise is zero (test hook).
  bool noise = true;
  // Multiplies every noise variance (test hook; 1 in normal operation).
  double noise_variance_scale = 1.0;
  // Propagate signal-only and noise-only copies alongside the received signal.
  bool decomposition = true;

  /// All drifts equal to `mu`, all relays at power `relay_power`.
  static NetworkConfig symmetric(int relays, double g, double h, double mu, double sigma2,
                                 Index outer_length, Index repetitions, double source_power,
                                 double relay_power);

  Index block_length() const { return outer_length * repetitions; }  // T
  bool equal_drifts() const;
  /// The common drift; throws UsageError when the drifts differ.
  double mu() const;
  double total_relay_power() const;

  /// Throws UsageError on any inconsistency (sizes, signs, finite sigma2).
  void validate() const;
};

/// alpha_k = sqrt(P2k / (1 + mu1k g P1)).
double compute_alpha(double relay_power, double mu_first, double g, double source_power);

/// Quantities fixed for every trial of a configuration.
struct RelayPlan {
  std::vector<double> alpha;
  std::vector<Index> repetitions;      // N'_k = round(mu2_1 N'_1 / mu2_k)
  std::vector<Index> first_hop_length; // floor(mu1_k T)
  double destination_width = 0.0;      // mu2_1 N'_1
  Index destination_length = 0;        // floor(N mu2_1 N'_1)
  double repetition_mismatch = 0.0;    // max_k |mu2_k N'_k - mu2_1 N'_1| / (mu2_1 N'_1)
  std::vector<StateDistribution> first_hop_law;
  std::vector<StateDistribution> second_hop_law;
};

RelayPlan plan_relays(const NetworkConfig& cfg);

/// Noise-free per-symbol amplitude of the destination statistic,
/// sum_k alpha_k sqrt(mu1k mu2k g h P1) (K alpha mu sqrt(g h P1) when
/// symmetric).
double signal_amplitude(const NetworkConfig& cfg, const RelayPlan& plan);

/// Worst-case signal floor on the good IDC event, K alpha mu sqrt(gh)
/// (1 - 4 delta_N) sqrt(P1). Symmetric drifts only.
double signal_floor(const NetworkConfig& cfg, const RelayPlan& plan);

/// Ceiling on the destination noise variance, K alpha^2 mu h + 1 (scaled by
/// the noise variance multiplier). Symmetric drifts only.
double noise_ceiling(const NetworkConfig& cfg, const RelayPlan& plan);

struct TransmissionRecord {
  Index message = 0;
  Index decoded = 0;
  double source_energy = 0.0;
  std::vector<double> relay_energy;
  Index channel_uses = 0;  // T

  Eigen::VectorXd transmitted;  // u_w, codeword order
  Eigen::VectorXd statistic;    // uhat after deinterleaving
  // Empty unless the configuration asks for the decomposition.
  Eigen::VectorXd signal;
  Eigen::VectorXd noise;
  double decomposition_residual = 0.0;  // max |statistic - signal - noise|

  // Channels 0..K-1 are first hop, K..2K-1 second hop.
  std::vector<Index> bad_pieces;

  bool idc_good() const;
  bool decoded_correctly() const { return decoded == message; }
};

struct TrialSeed {
  std::uint64_t master = 1;
  std::uint64_t trial = 0;
};

/// Runs the full pipeline for message `message`. All 2K state sequences and
/// all noises are drawn from independent streams keyed by `seed`.
TransmissionRecord simulate_transmission(const NetworkConfig& cfg, const RelayPlan& plan,
                                         const OuterCodebook& cb, Index message, TrialSeed seed);
TransmissionRecord simulate_transmission(const NetworkConfig& cfg, const OuterCodebook& cb,
                                         Index message, TrialSeed seed);

struct EnergyAudit {
  double source = 0.0;
  std::vector<double> relays;
  double total = 0.0;
  /// N (P1 + sum_k P2k): the budget the rate-per-unit-energy metric uses.
  double budget = 0.0;
  std::vector<bool> relay_over_budget;  // relay k spent more than N P2k
};

EnergyAudit energy_audit(const TransmissionRecord& rec, const NetworkConfig& cfg);

}  // namespace udn
