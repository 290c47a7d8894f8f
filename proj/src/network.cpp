#include "udn/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "udn/analysis.hpp"
#include "udn/rng.hpp"

namespace udn {

namespace {

// Lane layout of the propagated matrices.
constexpr Index kReceived = 0;
constexpr Index kSignal = 1;
constexpr Index kNoise = 2;

void add_noise(Lanes<double>& y, double variance, Engine rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  const bool split = y.cols() > 1;
  for (Index l = 0; l < y.rows(); ++l) {
    const double z = normal(rng);
    y(l, kReceived) += z;
    if (split) y(l, kNoise) += z;
  }
}

std::string fail(const std::string& what) { return "invalid network configuration: " + what; }

}  // namespace

NetworkConfig NetworkConfig::symmetric(int relays, double g, double h, double mu, double sigma2,
                                       Index outer_length, Index repetitions, double source_power,
                                       double relay_power) {
  NetworkConfig cfg;
  cfg.relays = relays;
  cfg.g = g;
  cfg.h = h;
  cfg.mu_first.assign(static_cast<std::size_t>(std::max(relays, 0)), mu);
  cfg.mu_second = cfg.mu_first;
  cfg.sigma2 = sigma2;
  cfg.outer_length = outer_length;
  cfg.repetitions = repetitions;
  cfg.source_power = source_power;
  cfg.relay_power.assign(static_cast<std::size_t>(std::max(relays, 0)), relay_power);
  return cfg;
}

bool NetworkConfig::equal_drifts() const {
  if (mu_first.empty()) return true;
  const double m = mu_first.front();
  auto same = [m](double x) { return x == m; };
  return std::all_of(mu_first.begin(), mu_first.end(), same) &&
         std::all_of(mu_second.begin(), mu_second.end(), same);
}

double NetworkConfig::mu() const {
  if (!equal_drifts() || mu_first.empty()) {
    throw UsageError("the drifts differ across channels; there is no common mu");
  }
  return mu_first.front();
}

double NetworkConfig::total_relay_power() const {
  return std::accumulate(relay_power.begin(), relay_power.end(), 0.0);
}

void NetworkConfig::validate() const {
  if (relays < 1) throw UsageError(fail("K must be at least 1"));
  const auto k = static_cast<std::size_t>(relays);
  if (mu_first.size() != k || mu_second.size() != k) {
    throw UsageError(fail("drift lists must have K=" + std::to_string(relays) + " entries"));
  }
  if (relay_power.size() != k) {
    throw UsageError(fail("relay power list must have K=" + std::to_string(relays) + " entries"));
  }
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(g) || !positive(h)) throw UsageError(fail("gains g and h must be positive"));
  if (!std::all_of(mu_first.begin(), mu_first.end(), positive) ||
      !std::all_of(mu_second.begin(), mu_second.end(), positive)) {
    throw UsageError(fail("all drifts must be positive"));
  }
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw UsageError(fail("sigma2 must be finite and nonnegative"));
  }
  if (outer_length < 1 || repetitions < 1) throw UsageError(fail("N and N' must be at least 1"));
  if (!positive(source_power) || !std::all_of(relay_power.begin(), relay_power.end(), positive)) {
    throw UsageError(fail("powers must be positive"));
  }
  if (!(margins.nu >= 0.0) || !(margins.beta >= 0.0)) {
    throw UsageError(fail("concentration margins must be nonnegative"));
  }
  if (interleaver_depth < 1) throw UsageError(fail("interleaver depth must be at least 1"));
  if (!(noise_variance_scale > 0.0)) throw UsageError(fail("noise variance scale must be positive"));
  for (std::size_t i = 0; i < k; ++i) {
    if (mu_first[i] * static_cast<double>(repetitions) < 1.0 ||
        mu_second[i] * static_cast<double>(repetitions) < 1.0) {
      throw UsageError(fail("mu * N' must be at least 1 so every block holds a sample"));
    }
  }
}

double compute_alpha(double relay_power, double mu_first, double g, double source_power) {
  if (relay_power < 0.0 || mu_first < 0.0 || g < 0.0 || source_power < 0.0) {
    throw UsageError("compute_alpha: arguments must be nonnegative");
  }
  return std::sqrt(relay_power / (1.0 + mu_first * g * source_power));
}

RelayPlan plan_relays(const NetworkConfig& cfg) {
  cfg.validate();
  RelayPlan plan;
  const auto k = static_cast<std::size_t>(cfg.relays);
  const double t = static_cast<double>(cfg.block_length());
  plan.destination_width = cfg.mu_second.front() * static_cast<double>(cfg.repetitions);
  plan.destination_length = block_boundary(cfg.outer_length, plan.destination_width);
  for (std::size_t i = 0; i < k; ++i) {
    plan.alpha.push_back(compute_alpha(cfg.relay_power[i], cfg.mu_first[i], cfg.g, cfg.source_power));
    const auto reps = static_cast<Index>(std::llround(plan.destination_width / cfg.mu_second[i]));
    plan.repetitions.push_back(std::max<Index>(reps, 1));
    plan.first_hop_length.push_back(static_cast<Index>(std::floor(cfg.mu_first[i] * t)));
    const double achieved = cfg.mu_second[i] * static_cast<double>(plan.repetitions.back());
    plan.repetition_mismatch = std::max(
        plan.repetition_mismatch, std::abs(achieved - plan.destination_width) / plan.destination_width);
    plan.first_hop_law.emplace_back(IdcParams{cfg.mu_first[i], cfg.sigma2, cfg.law});
    plan.second_hop_law.emplace_back(IdcParams{cfg.mu_second[i], cfg.sigma2, cfg.law});
  }
  return plan;
}

double signal_amplitude(const NetworkConfig& cfg, const RelayPlan& plan) {
  double amp = 0.0;
  for (std::size_t i = 0; i < plan.alpha.size(); ++i) {
    amp += plan.alpha[i] * std::sqrt(cfg.mu_first[i] * cfg.mu_second[i] * cfg.g * cfg.h);
  }
  return amp * std::sqrt(cfg.source_power);
}

double signal_floor(const NetworkConfig& cfg, const RelayPlan& plan) {
  const double mu = cfg.mu();
  const double delta = delta_n(cfg.margins.nu, cfg.margins.beta, mu, cfg.repetitions);
  return cfg.relays * plan.alpha.front() * mu * std::sqrt(cfg.g * cfg.h) * (1.0 - 4.0 * delta) *
         std::sqrt(cfg.source_power);
}

double noise_ceiling(const NetworkConfig& cfg, const RelayPlan& plan) {
  const double mu = cfg.mu();
  const double a = plan.alpha.front();
  return (cfg.relays * a * a * mu * cfg.h + 1.0) * cfg.noise_variance_scale;
}

bool TransmissionRecord::idc_good() const {
  return std::all_of(bad_pieces.begin(), bad_pieces.end(), [](Index b) { return b == 0; });
}

TransmissionRecord simulate_transmission(const NetworkConfig& cfg, const RelayPlan& plan,
                                         const OuterCodebook& cb, Index message, TrialSeed seed) {
  if (cb.length() != cfg.outer_length) {
    throw UsageError("codebook length " + std::to_string(cb.length()) + " does not match N=" +
                     std::to_string(cfg.outer_length));
  }
  if (cb.power() != cfg.source_power) {
    throw UsageError("codebook power does not match the configured P1");
  }
  if (message < 0 || message >= cb.words().cols()) {
    throw UsageError("message index out of range");
  }

  const Index n = cfg.outer_length;
  const Index t = cfg.block_length();
  const Index lanes = cfg.decomposition ? 3 : 1;
  const double noise_var = cfg.noise_variance_scale;

  TransmissionRecord rec;
  rec.message = message;
  rec.channel_uses = t;
  rec.transmitted = cb.codeword(message);

  // Source: interleave, repeat N' times, attenuate by 1/sqrt(N').
  Lanes<double> outer = Lanes<double>::Zero(n, lanes);
  outer.col(kReceived) = interleave(rec.transmitted, cfg.interleaver_depth);
  if (lanes > 1) outer.col(kSignal) = outer.col(kReceived);
  const Lanes<double> x =
      inner_encode(outer, {cfg.repetitions, 1.0 / std::sqrt(static_cast<double>(cfg.repetitions))});
  rec.source_energy = x.col(kReceived).squaredNorm();

  Lanes<double> y = Lanes<double>::Zero(plan.destination_length, lanes);
  const double sqrt_g = std::sqrt(cfg.g);
  const double sqrt_h = std::sqrt(cfg.h);
  rec.bad_pieces.assign(2 * plan.alpha.size(), 0);

  for (std::size_t k = 0; k < plan.alpha.size(); ++k) {
    const auto stream = static_cast<std::uint32_t>(k);

    // First hop and relay front end.
    Engine first_rng = make_engine(seed.master, seed.trial, Stream::first_hop_states, stream);
    const StateSequence first = sample_states(plan.first_hop_law[k], t, first_rng);
    rec.bad_pieces[k] = count_bad_pieces(piece_stats(first, n, cfg.repetitions), cfg.mu_first[k],
                                         cfg.repetitions, cfg.margins);
    Lanes<double> yk = sqrt_g * apply_idc_truncated(x, first, plan.first_hop_length[k]);
    if (cfg.noise) {
      add_noise(yk, noise_var, make_engine(seed.master, seed.trial, Stream::relay_noise, stream));
    }
    const Lanes<double> uk =
        block_average(yk, n, cfg.mu_first[k] * static_cast<double>(cfg.repetitions));

    // Relay re-encoding with its own repetition length.
    const Index reps = plan.repetitions[k];
    const Lanes<double> vk =
        inner_encode(uk, {reps, plan.alpha[k] / std::sqrt(static_cast<double>(reps))});
    rec.relay_energy.push_back(vk.col(kReceived).squaredNorm());

    // Second hop.
    Engine second_rng = make_engine(seed.master, seed.trial, Stream::second_hop_states, stream);
    const StateSequence second = sample_states(plan.second_hop_law[k], n * reps, second_rng);
    rec.bad_pieces[plan.alpha.size() + k] =
        count_bad_pieces(piece_stats(second, n, reps), cfg.mu_second[k], reps, cfg.margins);
    y.noalias() += sqrt_h * apply_idc_truncated(vk, second, plan.destination_length);
  }
  if (cfg.noise) {
    add_noise(y, noise_var, make_engine(seed.master, seed.trial, Stream::destination_noise));
  }

  const Lanes<double> uhat =
      deinterleave(block_average(y, n, plan.destination_width), cfg.interleaver_depth);
  rec.statistic = uhat.col(kReceived);
  if (lanes > 1) {
    rec.signal = uhat.col(kSignal);
    rec.noise = uhat.col(kNoise);
    rec.decomposition_residual = (rec.statistic - rec.signal - rec.noise).cwiseAbs().maxCoeff();
  }
  rec.decoded = ml_decode(cb, rec.statistic);
  return rec;
}

TransmissionRecord simulate_transmission(const NetworkConfig& cfg, const OuterCodebook& cb,
                                         Index message, TrialSeed seed) {
  return simulate_transmission(cfg, plan_relays(cfg), cb, message, seed);
}

EnergyAudit energy_audit(const TransmissionRecord& rec, const NetworkConfig& cfg) {
  EnergyAudit audit;
  audit.source = rec.source_energy;
  audit.relays = rec.relay_energy;
  audit.total = audit.source + std::accumulate(audit.relays.begin(), audit.relays.end(), 0.0);
  const double n = static_cast<double>(cfg.outer_length);
  audit.budget = n * (cfg.source_power + cfg.total_relay_power());
  for (std::size_t k = 0; k < audit.relays.size(); ++k) {
    audit.relay_over_budget.push_back(audit.relays[k] > n * cfg.relay_power[k]);
  }
  return audit;
}

}  // namespace udn
