#pragma once

// Closed-form quantities: capacity-per-unit-energy bounds, the five-case
// capacity upper bound, SNR floors, power selection, AWGN and BPSK-AWGN
// capacities and the constants built from them.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "udn/common.hpp"

namespace udn {

/// min{K g, sqrt(K g h), K h}
double min_cut_metric(int relays, double g, double h);

/// (2 / ln 2) min{K g, sqrt(K g h), K h}, bits per unit energy.
double sync_upper_bound(int relays, double g, double h);

/// (mu / 10) min{K g, sqrt(K g h), K h}, bits per unit energy.
double unsync_lower_bound(int relays, double g, double h, double mu);

struct CapacityBound {
  double bits = 0.0;  // per channel use
  int case_index = 0; // 1..5 in the order the conditions are listed
};

/// Five-case upper bound on the capacity of the synchronized network with
/// powers (P1, P2). The cases are tested in order and the first match wins.
/// Throws DomainError for K < 2.
CapacityBound capacity_upper_bound(double p1, double p2, int relays, double g, double h);

/// K^2 mu^2 P1 P2 g h / (1 + mu g P1 + K mu h P2)
double snr_lb(double p1, double p2, int relays, double g, double h, double mu);

/// (sum_k alpha_k sqrt(mu1k mu2k g h))^2 P1 / (1 + h sum_k mu2k alpha_k^2),
/// alpha_k = sqrt(P2k / (1 + mu1k g P1)).
double snr_lb_unequal(double p1, std::span<const double> p2, std::span<const double> mu_first,
                      std::span<const double> mu_second, double g, double h);

enum class Regime { mac_limited, intermediate, bc_limited };

/// h < g/K -> MAC-limited, g/K <= h < K g -> intermediate, h >= K g -> BC-limited.
Regime classify_regime(int relays, double g, double h);
std::string_view to_string(Regime regime);

struct PowerSelection {
  double p1 = 0.0;
  std::vector<double> p2;  // one entry per relay
  Regime regime = Regime::intermediate;
};

PowerSelection select_powers(int relays, double g, double h, double mu);
PowerSelection select_powers_unequal(int relays, double g, double h,
                                     std::span<const double> mu_first,
                                     std::span<const double> mu_second);

/// 0.5 log2(1 + snr)
double awgn_capacity(double snr);

/// Mutual information of an equiprobable +/-sqrt(snr) input over unit
/// variance AWGN, by adaptive Gauss-Kronrod quadrature with absolute error
/// <= tol. Throws DomainError if the node budget runs out first.
double bpsk_awgn_capacity(double snr, double tol = 1e-6);

struct GammaConstant {
  double value = 0.0;       // min of C_binary / C over the grid
  double argmin_snr = 0.0;
  double ratio_at_half = 0.0;
  bool attained_at_half = false;
};

/// Grid of 101 equally spaced SNRs on [1/3, 1/2].
GammaConstant gamma_constant(double tol = 1e-6);

/// gamma mu log2(4/3) / 4 * min{K g, sqrt(K g h), K h}. Throws
/// std::logic_error if this ever falls below unsync_lower_bound.
double achievable_rpue(int relays, double g, double h, double mu);

/// 2 (1 / min_k mu1k + (1/K) sum_k 1/mu2k)^{-1}
double mu_tilde(std::span<const double> mu_first, std::span<const double> mu_second);

/// min(1, 4 K sigma2 / N)
double e_idc_probability_bound(int relays, Index outer_length, double sigma2);

/// (nu + beta) / (mu N')
double delta_n(double nu, double beta, double mu, Index repetitions);

/// K g / (1 + K g / h) <= sqrt(K g h) / 2
bool amgm_check(int relays, double g, double h);

struct BoundsReport {
  int relays = 0;
  double g = 0.0, h = 0.0, mu = 0.0;  // mu is mu_tilde when drifts differ
  double min_cut_metric = 0.0;
  double sync_ub = 0.0;
  double unsync_lb = 0.0;
  double ratio = 0.0;
  Regime regime = Regime::intermediate;
  PowerSelection powers;
  double snr_lb = 0.0;
  double gamma = 0.0;
  double achievable_rpue = 0.0;
};

/// Symmetric drifts.
BoundsReport bounds_report(int relays, double g, double h, double mu);
/// Per-relay drifts; mu in the report is mu_tilde.
BoundsReport bounds_report(int relays, double g, double h, std::span<const double> mu_first,
                           std::span<const double> mu_second);

/// JSON object with keys: K, g, h, mu, min_cut_metric, sync_ub, unsync_lb,
/// ratio, regime, P1, P2 (array), snr_lb, gamma, achievable_rpue.
std::string to_json(const BoundsReport& report, int indent = 2);

}  // namespace udn
