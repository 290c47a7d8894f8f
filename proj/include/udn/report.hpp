#pragma once

// Tabular export of experiment results. The column set and order are fixed;
// the plotting tools depend on them.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "udn/harness.hpp"

namespace udn {

inline constexpr std::array<std::string_view, 26> kResultColumns{
    "K",        "g",         "h",
    "mu",       "sigma2",    "N",
    "Nprime",   "M",         "trials",
    "P1",       "P2",        "regime",
    "snr_lb",   "snr_measured_mean", "snr_measured_min_good",
    "bler",     "bler_ci_lo", "bler_ci_hi",
    "e_idc_freq", "e_idc_bound", "source_energy_mean",
    "relay_energy_mean", "rpue_achieved", "rpue_lb",
    "rpue_ub",  "seed"};

struct ResultRow {
  int K = 0;
  double g = 0, h = 0, mu = 0, sigma2 = 0;
  std::int64_t N = 0, Nprime = 0;
  std::uint64_t M = 0;
  std::int64_t trials = 0;
  double P1 = 0, P2 = 0;  // P2: mean over relays
  std::string regime;
  double snr_lb = 0, snr_measured_mean = 0, snr_measured_min_good = 0;
  double bler = 0, bler_ci_lo = 0, bler_ci_hi = 0;
  double e_idc_freq = 0, e_idc_bound = 0;
  double source_energy_mean = 0, relay_energy_mean = 0;
  double rpue_achieved = 0, rpue_lb = 0, rpue_ub = 0;
  std::uint64_t seed = 0;
};

/// Measured columns are NaN for a failed sweep point.
ResultRow make_row(const SweepRow& row);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

/// JSON array of objects keyed exactly like the CSV columns.
std::string rows_to_json(const std::vector<ResultRow>& rows, int indent = 2);

}  // namespace udn
