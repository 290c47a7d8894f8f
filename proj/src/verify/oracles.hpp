#pragma once

// Reference implementations kept deliberately separate from the library code
// they check: plain loops, different numerical methods, no shared helpers.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "udn/coding.hpp"

namespace udn::oracle {

/// Exhaustive minimum-Euclidean-distance decoder; lowest index wins ties.
Index brute_force_decode(const OuterCodebook& cb, const Eigen::VectorXd& received);

/// Binary-input AWGN mutual information by the trapezoid rule on a fixed
/// wide grid, in bits.
double bpsk_capacity_trapezoid(double snr);

/// 0.5 log2(1 + snr), written out with log1p.
double gaussian_capacity(double snr);

/// Expression-tree evaluation of the unequal-drift SNR floor.
double snr_lb_unequal_tree(double p1, std::span<const double> p2, std::span<const double> mu_first,
                           std::span<const double> mu_second, double g, double h);

/// min{Kg, sqrt(Kgh), Kh} by enumeration of the three cut values.
double min_cut(int relays, double g, double h);

/// Exact moments of the three-point law fitted to (mu, sigma2).
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments three_point_moments(double mu, double sigma2);

/// Block error rate of an independent BPSK-AWGN link: fresh random antipodal
/// codebook of M words at unit power, N(0, 1/snr) noise, exhaustive decoding.
struct ReferenceLink {
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  double rate() const { return trials ? static_cast<double>(errors) / static_cast<double>(trials) : 0.0; }
};
ReferenceLink bpsk_awgn_link(double snr, std::uint64_t messages, Index length, std::int64_t trials,
                             std::uint64_t seed);

}  // namespace udn::oracle
