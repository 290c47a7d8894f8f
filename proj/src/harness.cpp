#include "udn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "udn/rng.hpp"

namespace udn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything a trial contributes to the aggregate. Kept small so that
// thousands of trials can be held and folded in index order.
struct TrialOutcome {
  bool correct = false;
  bool good = false;
  bool reference_agrees = false;
  double source_energy = 0.0;
  std::vector<double> relay_energy;
  bool relay_over_budget = false;
  Index bad_pieces = 0;
  double signal_sq = 0.0;
  double noise_sq = 0.0;
  double min_signed_signal = std::numeric_limits<double>::infinity();
  double residual = 0.0;
};

double snr_at_powers(const NetworkConfig& cfg) {
  if (cfg.equal_drifts()) {
    return snr_lb(cfg.source_power, cfg.relay_power.front(), cfg.relays, cfg.g, cfg.h, cfg.mu());
  }
  return snr_lb_unequal(cfg.source_power, cfg.relay_power, cfg.mu_first, cfg.mu_second, cfg.g,
                        cfg.h);
}

double gamma_value() {
  static const double gamma = gamma_constant().value;
  return gamma;
}

}  // namespace

MarginPreset parse_margin_preset(std::string_view name) {
  if (name == "desk") return MarginPreset::desk;
  if (name == "paper") return MarginPreset::paper;
  if (name == "custom") return MarginPreset::custom;
  throw ConfigError("unknown margin preset '" + std::string(name) +
                    "' (expected desk, paper or custom)");
}

std::string_view to_string(MarginPreset preset) {
  switch (preset) {
    case MarginPreset::desk: return "desk";
    case MarginPreset::paper: return "paper";
    case MarginPreset::custom: return "custom";
  }
  return "unknown";
}

void ExperimentSpec::resolve() {
  NetworkConfig& cfg = network;
  const auto k = static_cast<std::size_t>(std::max(cfg.relays, 1));
  if (cfg.mu_first.size() == 1 && k > 1) cfg.mu_first.assign(k, cfg.mu_first.front());
  if (cfg.mu_second.size() == 1 && k > 1) cfg.mu_second.assign(k, cfg.mu_second.front());
  if (auto_powers) {
    const PowerSelection sel =
        select_powers_unequal(cfg.relays, cfg.g, cfg.h, cfg.mu_first, cfg.mu_second);
    cfg.source_power = sel.p1;
    cfg.relay_power = sel.p2;
  }
  switch (margin_preset) {
    case MarginPreset::desk:
      cfg.margins = desk_margins(cfg.outer_length, cfg.repetitions, cfg.sigma2, margin_scale);
      break;
    case MarginPreset::paper:
      cfg.margins = paper_scaling_margins(cfg.outer_length);
      break;
    case MarginPreset::custom:
      break;
  }
}

ProportionInterval proportion_interval(Index successes, Index trials) {
  if (trials < 1) throw UsageError("proportion_interval: need at least one trial");
  const double n = static_cast<double>(trials);
  ProportionInterval ci;
  ci.estimate = static_cast<double>(successes) / n;
  if (successes == 0) {
    ci.lo = 0.0;
    ci.hi = std::min(1.0, 3.0 / n);
  } else if (successes == trials) {
    ci.lo = std::max(0.0, 1.0 - 3.0 / n);
    ci.hi = 1.0;
  } else {
    const double half = 1.96 * std::sqrt(ci.estimate * (1.0 - ci.estimate) / n);
    ci.lo = std::max(0.0, ci.estimate - half);
    ci.hi = std::min(1.0, ci.estimate + half);
  }
  return ci;
}

int rate_matched_log2m(double fraction, double snr, Index outer_length, bool round_up) {
  const double bits = fraction * gamma_value() * awgn_capacity(snr) * static_cast<double>(outer_length);
  return static_cast<int>(round_up ? std::ceil(bits) : std::floor(bits));
}

std::uint64_t resolve_messages(const ExperimentSpec& spec) {
  if (spec.codebook.messages != 0) return spec.codebook.messages;
  const int log2m = rate_matched_log2m(spec.codebook.rate_fraction, snr_at_powers(spec.network),
                                       spec.network.outer_length);
  if (log2m >= 63) {
    throw UsageError("rate-matched codebook needs M = 2^" + std::to_string(log2m) +
                     " codewords, beyond any feasible simulation");
  }
  return std::uint64_t{1} << std::max(log2m, 1);
}

double estimate_memory_bytes(const ExperimentSpec& spec, std::uint64_t messages) {
  const NetworkConfig& cfg = spec.network;
  const double lanes = cfg.decomposition ? 3.0 : 1.0;
  const double t = static_cast<double>(cfg.block_length());
  double longest = t;
  for (double m : cfg.mu_first) longest = std::max(longest, m * t);
  for (double m : cfg.mu_second) longest = std::max(longest, m * t);
  // x, y_k, v_k, y and one temporary, plus two state vectors.
  const double per_worker = 8.0 * lanes * (t + 4.0 * longest) + 8.0 * longest;
  const unsigned workers =
      spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  return codebook_bytes(static_cast<double>(messages), cfg.outer_length) + workers * per_worker;
}

ExperimentResult run_experiment(ExperimentSpec spec) {
  const auto started = std::chrono::steady_clock::now();
  if (spec.trials < 1) throw UsageError("trial count must be at least 1");
  spec.resolve();
  const NetworkConfig& cfg = spec.network;
  const RelayPlan plan = plan_relays(cfg);

  const std::uint64_t messages = resolve_messages(spec);
  if (messages < 2) throw UsageError("codebook needs M >= 2");
  const double needed = estimate_memory_bytes(spec, messages);
  if (needed > spec.max_memory_bytes) {
    std::ostringstream os;
    os << "pre-flight refusal: M=" << messages << ", N=" << cfg.outer_length
       << ", N'=" << cfg.repetitions << " needs an estimated " << needed / (1024.0 * 1024.0)
       << " MiB, limit is " << spec.max_memory_bytes / (1024.0 * 1024.0) << " MiB";
    throw UsageError(os.str());
  }

  OuterCodebook cb;
  const auto& path = spec.codebook.path;
  if (path && std::filesystem::exists(*path)) {
    cb = load_codebook(*path);
    if (cb.messages() != messages || cb.length() != cfg.outer_length ||
        cb.power() != cfg.source_power) {
      throw UsageError("codebook file " + path->string() + " does not match the experiment (M, N, P1)");
    }
  } else {
    cb = generate_codebook(messages, cfg.outer_length, cfg.source_power, spec.codebook.seed);
    if (path) save_codebook(cb, *path);
  }

  const Index trials = spec.trials;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const double budget_per_relay = static_cast<double>(cfg.outer_length);

  auto worker = [&] {
    for (Index i = next++; i < trials; i = next++) {
      try {
        const TrialSeed seed{cfg.seed, static_cast<std::uint64_t>(i)};
        Engine pick = make_engine(seed.master, seed.trial, Stream::message);
        std::uniform_int_distribution<std::uint64_t> uniform(0, messages - 1);
        const auto message = static_cast<Index>(uniform(pick));
        const TransmissionRecord rec = simulate_transmission(cfg, plan, cb, message, seed);

        TrialOutcome& out = outcomes[static_cast<std::size_t>(i)];
        out.correct = rec.decoded_correctly();
        out.good = rec.idc_good();
        out.source_energy = rec.source_energy;
        out.relay_energy = rec.relay_energy;
        for (std::size_t k = 0; k < rec.relay_energy.size(); ++k) {
          if (rec.relay_energy[k] > budget_per_relay * cfg.relay_power[k]) out.relay_over_budget = true;
        }
        out.bad_pieces = std::accumulate(rec.bad_pieces.begin(), rec.bad_pieces.end(), Index{0});
        if (cfg.decomposition) {
          out.signal_sq = rec.signal.squaredNorm();
          out.noise_sq = rec.noise.squaredNorm();
          out.min_signed_signal = rec.signal.cwiseProduct(rec.transmitted.cwiseSign()).minCoeff();
          out.residual = rec.decomposition_residual;
        }
        if (spec.reference_decoder) {
          out.reference_agrees = spec.reference_decoder(cb, rec.statistic) == rec.decoded;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };

  const unsigned workers = std::max(
      1u, std::min<unsigned>(spec.threads ? spec.threads : std::thread::hardware_concurrency(),
                             static_cast<unsigned>(trials)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  // Deterministic fold in trial order.
  ExperimentResult r;
  r.trials = trials;
  r.messages = messages;
  const auto k = static_cast<std::size_t>(cfg.relays);
  const double n_sym = static_cast<double>(cfg.outer_length);
  r.relay_energy_mean.assign(k, 0.0);
  r.relay_energy_stderr.assign(k, 0.0);
  std::vector<double> relay_sq(k, 0.0);
  double signal_sq = 0.0, noise_sq = 0.0, signal_sq_good = 0.0, noise_sq_good = 0.0;
  double min_signed_good = std::numeric_limits<double>::infinity();
  Index over_budget = 0, bad_pieces = 0, agreements = 0;
  for (const TrialOutcome& o : outcomes) {
    if (!o.correct) ++r.block_errors;
    if (o.good) {
      ++r.good_trials;
      if (!o.correct) ++r.good_block_errors;
      signal_sq_good += o.signal_sq;
      noise_sq_good += o.noise_sq;
      min_signed_good = std::min(min_signed_good, o.min_signed_signal);
    } else {
      ++r.e_idc_count;
    }
    if (o.reference_agrees) ++agreements;
    r.source_energy_mean += o.source_energy;
    r.source_energy_max_deviation = std::max(
        r.source_energy_max_deviation, std::abs(o.source_energy - n_sym * cfg.source_power));
    for (std::size_t i = 0; i < k; ++i) {
      r.relay_energy_mean[i] += o.relay_energy[i];
      relay_sq[i] += o.relay_energy[i] * o.relay_energy[i];
    }
    if (o.relay_over_budget) ++over_budget;
    bad_pieces += o.bad_pieces;
    signal_sq += o.signal_sq;
    noise_sq += o.noise_sq;
    r.decomposition_residual = std::max(r.decomposition_residual, o.residual);
  }
  const double nt = static_cast<double>(trials);
  r.bler = proportion_interval(r.block_errors, trials);
  r.conditional_bler =
      r.good_trials ? static_cast<double>(r.good_block_errors) / static_cast<double>(r.good_trials) : kNaN;
  r.source_energy_mean /= nt;
  for (std::size_t i = 0; i < k; ++i) {
    r.relay_energy_mean[i] /= nt;
    const double var = trials > 1 ? std::max(0.0, (relay_sq[i] / nt - r.relay_energy_mean[i] *
                                                                          r.relay_energy_mean[i]) *
                                                      nt / (nt - 1.0))
                                  : 0.0;
    r.relay_energy_stderr[i] = std::sqrt(var / nt);
  }
  r.relay_over_budget_freq = static_cast<double>(over_budget) / nt;
  r.e_idc_freq = static_cast<double>(r.e_idc_count) / nt;
  r.e_idc_bound = e_idc_probability_bound(cfg.relays, cfg.outer_length, cfg.sigma2);
  {
    // Union over the 2K channels of the per-channel Chebyshev bound.
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sum += chebyshev_channel_bound(cfg.outer_length, cfg.repetitions, cfg.sigma2, cfg.margins);
      sum += chebyshev_channel_bound(cfg.outer_length, plan.repetitions[i], cfg.sigma2, cfg.margins);
    }
    r.e_idc_chebyshev_bound = std::min(1.0, sum);
  }
  r.bad_piece_freq = static_cast<double>(bad_pieces) / (nt * 2.0 * static_cast<double>(k) * n_sym);

  r.snr_lb = snr_at_powers(cfg);
  if (cfg.decomposition) {
    const double symbols = nt * n_sym;
    r.noise_variance = noise_sq / symbols;
    r.snr_measured_mean = (signal_sq / symbols) / r.noise_variance;
    if (r.good_trials > 0) {
      const double good_symbols = static_cast<double>(r.good_trials) * n_sym;
      r.noise_variance_good = noise_sq_good / good_symbols;
      r.snr_measured_mean_good = (signal_sq_good / good_symbols) / r.noise_variance_good;
      const double worst = std::max(0.0, min_signed_good);
      r.snr_measured_min_good = worst * worst / r.noise_variance_good;
      r.min_signal_good = min_signed_good;
    } else {
      r.noise_variance_good = r.snr_measured_mean_good = r.snr_measured_min_good = kNaN;
      r.min_signal_good = kNaN;
    }
  } else {
    r.noise_variance = r.noise_variance_good = kNaN;
    r.snr_measured_mean = r.snr_measured_mean_good = r.snr_measured_min_good = kNaN;
    r.min_signal_good = kNaN;
  }
  r.signal_floor = cfg.equal_drifts() ? signal_floor(cfg, plan) : kNaN;

  const double log2m = std::log2(static_cast<double>(messages));
  r.rate_bits_per_symbol = log2m / n_sym;
  r.effective_capacity = gamma_value() * awgn_capacity(r.snr_lb);
  r.rpue_achieved = log2m / (n_sym * (cfg.source_power + cfg.total_relay_power()));
  r.repetition_mismatch = plan.repetition_mismatch;
  if (spec.reference_decoder) r.reference_agreements = agreements;
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::string to_json(const ExperimentResult& r, int indent) {
  nlohmann::ordered_json j;
  j["trials"] = r.trials;
  j["M"] = r.messages;
  j["block_errors"] = r.block_errors;
  j["bler"] = r.bler.estimate;
  j["bler_ci_lo"] = r.bler.lo;
  j["bler_ci_hi"] = r.bler.hi;
  j["good_trials"] = r.good_trials;
  j["good_block_errors"] = r.good_block_errors;
  j["conditional_bler"] = r.conditional_bler;
  j["snr_lb"] = r.snr_lb;
  j["snr_measured_mean"] = r.snr_measured_mean;
  j["snr_measured_mean_good"] = r.snr_measured_mean_good;
  j["snr_measured_min_good"] = r.snr_measured_min_good;
  j["noise_variance"] = r.noise_variance;
  j["noise_variance_good"] = r.noise_variance_good;
  j["min_signal_good"] = r.min_signal_good;
  j["signal_floor"] = r.signal_floor;
  j["decomposition_residual"] = r.decomposition_residual;
  j["source_energy_mean"] = r.source_energy_mean;
  j["source_energy_max_deviation"] = r.source_energy_max_deviation;
  j["relay_energy_mean"] = r.relay_energy_mean;
  j["relay_energy_stderr"] = r.relay_energy_stderr;
  j["relay_over_budget_freq"] = r.relay_over_budget_freq;
  j["e_idc_count"] = r.e_idc_count;
  j["e_idc_freq"] = r.e_idc_freq;
  j["e_idc_bound"] = r.e_idc_bound;
  j["e_idc_chebyshev_bound"] = r.e_idc_chebyshev_bound;
  j["bad_piece_freq"] = r.bad_piece_freq;
  j["rate_bits_per_symbol"] = r.rate_bits_per_symbol;
  j["effective_capacity"] = r.effective_capacity;
  j["rpue_achieved"] = r.rpue_achieved;
  j["repetition_mismatch"] = r.repetition_mismatch;
  if (r.reference_agreements) j["reference_agreements"] = *r.reference_agreements;
  return j.dump(indent);
}

std::size_t SweepGrid::points() const {
  return relays.size() * g.size() * h.size() * mu.size() * sigma2.size() * outer_length.size();
}

std::vector<SweepRow> sweep(const ExperimentSpec& base, const SweepGrid& grid) {
  if (grid.points() == 0) throw UsageError("sweep grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(grid.points());
  for (int k : grid.relays)
    for (double g : grid.g)
      for (double h : grid.h)
        for (double mu : grid.mu)
          for (double s2 : grid.sigma2)
            for (Index n : grid.outer_length) {
              SweepRow row;
              row.spec = base;
              NetworkConfig& cfg = row.spec.network;
              cfg.relays = k;
              cfg.g = g;
              cfg.h = h;
              cfg.mu_first.assign(static_cast<std::size_t>(std::max(k, 0)), mu);
              cfg.mu_second = cfg.mu_first;
              cfg.relay_power.resize(static_cast<std::size_t>(std::max(k, 0)),
                                     cfg.relay_power.empty() ? 1.0 : cfg.relay_power.front());
              cfg.sigma2 = s2;
              cfg.outer_length = n;
              try {
                row.spec.resolve();
                row.bounds = bounds_report(k, g, h, mu);
                row.result = run_experiment(row.spec);
              } catch (const std::exception& e) {
                row.error = e.what();
              }
              rows.push_back(std::move(row));
            }
  return rows;
}

std::vector<std::size_t> sweep_bound_violations(const std::vector<SweepRow>& rows) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.result && !(r.result->rpue_achieved >= 0.0 && r.result->rpue_achieved <= r.bounds.sync_ub)) {
      bad.push_back(i);
    }
  }
  return bad;
}

}  // namespace udn
