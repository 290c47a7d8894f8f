#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "udn/analysis.hpp"
#include "udn/harness.hpp"
#include "udn/idc.hpp"
#include "udn/rng.hpp"
#include "udn/verify.hpp"
#include "verify/oracles.hpp"

namespace udn {

namespace {

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

struct GridPoint {
  int relays;
  double g, h;
};

// K uniform on [kmin, 64], g and h log-uniform over six decades.
std::vector<GridPoint> random_grid(std::size_t count, int kmin, std::uint64_t seed) {
  Engine rng = make_engine(seed, 0, Stream::test);
  std::uniform_int_distribution<int> k(kmin, 64);
  std::uniform_real_distribution<double> decade(-3.0, 3.0);
  std::vector<GridPoint> grid(count);
  for (auto& p : grid) {
    p.relays = k(rng);
    p.g = std::pow(10.0, decade(rng));
    p.h = std::pow(10.0, decade(rng));
  }
  return grid;
}

NetworkConfig base_network(int relays, double sigma2, Index n, Index reps) {
  NetworkConfig cfg = NetworkConfig::symmetric(relays, 1.0, 1.0, 1.0, sigma2, n, reps, 1.0, 1.0);
  cfg.seed = 20240611;
  return cfg;
}

// ---------------------------------------------------------------------------

CheckResult gamma_check() {
  CheckResult c{1, "binary-input capacity ratio", true, {}, 0.0};
  const double cb = bpsk_awgn_capacity(0.5);
  const double cg = awgn_capacity(0.5);
  const GammaConstant gamma = gamma_constant();
  const bool ok_b = std::abs(cb - 0.29048) <= 5e-4;
  const bool ok_g = std::abs(cg - 0.29248) <= 1e-5;
  const bool ok_gamma = gamma.value >= 0.99;
  c.passed = ok_b && ok_g && ok_gamma;
  c.details.push_back("C_bin(0.5) = " + num(cb, 8) + " (target 0.29048 +/- 5e-4)");
  c.details.push_back("C(0.5) = " + num(cg, 8) + " (target 0.29248 +/- 1e-5)");
  c.details.push_back("gamma = " + num(gamma.value, 8) + " (need >= 0.99), argmin snr " +
                      num(gamma.argmin_snr) + (gamma.attained_at_half ? ", at 1/2" : ", NOT at 1/2"));
  c.details.push_back("trapezoid reference C_bin(0.5) = " +
                      num(oracle::bpsk_capacity_trapezoid(0.5), 8));
  return c;
}

CheckResult ratio_check() {
  CheckResult c{2, "synchronized/unsynchronized bound ratio", true, {}, 0.0};
  const double target = 20.0 / std::numbers::ln2;
  double worst = 0.0;
  for (const auto& p : random_grid(1000, 2, 2)) {
    const double r = sync_upper_bound(p.relays, p.g, p.h) / unsync_lower_bound(p.relays, p.g, p.h, 1.0);
    worst = std::max(worst, std::abs(r - target));
  }
  c.passed = worst <= 1e-9 && target <= 29.0;
  c.details.push_back("1000 points, max |ratio - 20/ln2| = " + num(worst, 3) + " (need <= 1e-9)");
  c.details.push_back("20/ln2 = " + num(target, 10) + " <= 29");
  return c;
}

CheckResult snr_interval_check() {
  CheckResult c{3, "selected-power SNR interval", true, {}, 0.0};
  int outside = 0, exact_fail = 0;
  double lo = 1.0, hi = 0.0;
  GridPoint worst{};
  for (const auto& p : random_grid(1000, 2, 3)) {
    const PowerSelection sel = select_powers(p.relays, p.g, p.h, 1.0);
    const double s = snr_lb(sel.p1, sel.p2.front(), p.relays, p.g, p.h, 1.0);
    if (s < 1.0 / 3.0 || s > 0.5) ++outside;
    if (s > hi) worst = p;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    if (sel.regime != Regime::intermediate) {
      const double exact = 1.0 / (2.0 + 1.0 / p.relays);
      if (std::abs(s - exact) > 1e-12 * exact) ++exact_fail;
    }
  }
  c.passed = outside == 0 && exact_fail == 0;
  c.details.push_back("1000 points: snr_lb range [" + num(lo) + ", " + num(hi) +
                      "], outside [1/3, 1/2]: " + std::to_string(outside));
  c.details.push_back("largest at K=" + std::to_string(worst.relays) + " g=" + num(worst.g) +
                      " h=" + num(worst.h));
  c.details.push_back("MAC/BC points not equal to 1/(2+1/K): " + std::to_string(exact_fail));
  return c;
}

CheckResult noiseless_check() {
  CheckResult c{4, "noiseless pipeline identity", true, {}, 0.0};
  const double g = 1.7, h = 0.6;
  for (int k : {1, 2, 4}) {
    NetworkConfig cfg = base_network(k, 0.0, 16, 32);
    cfg.g = g;
    cfg.h = h;
    cfg.noise = false;
    const RelayPlan plan = plan_relays(cfg);
    const OuterCodebook cb = generate_codebook(8, cfg.outer_length, cfg.source_power, 5);
    double worst = 0.0;
    for (Index m = 0; m < 8; ++m) {
      const TransmissionRecord rec = simulate_transmission(cfg, plan, cb, m, {cfg.seed, 0});
      const double amp = k * plan.alpha.front() * std::sqrt(g * h);
      const Eigen::VectorXd expected = amp * rec.transmitted;
      worst = std::max(worst, (rec.statistic - expected).cwiseAbs().maxCoeff() /
                                  expected.cwiseAbs().minCoeff());
    }
    if (worst > 1e-9) c.passed = false;
    c.details.push_back("K=" + std::to_string(k) + ": max relative error " + num(worst, 3) +
                        " (need <= 1e-9)");
  }
  return c;
}

CheckResult snr_floor_check(const VerifyOptions& opt) {
  CheckResult c{5, "SNR floor with deterministic states", true, {}, 0.0};
  const bool full = opt.level == VerifyLevel::full;
  ExperimentSpec spec;
  spec.network = base_network(2, 0.0, 256, full ? 4096 : 256);
  spec.network.noise_variance_scale = opt.noise_tamper;
  spec.codebook.messages = 16;
  spec.trials = 400;
  spec.threads = opt.threads;
  const ExperimentResult r = run_experiment(spec);
  const double symbols = static_cast<double>(r.trials) * 256.0;
  const double rel = std::abs(r.snr_measured_mean / r.snr_lb - 1.0);
  c.passed = rel <= 0.05 && symbols >= 1e5;
  c.details.push_back("N=256, N'=" + std::to_string(spec.network.repetitions) + ", " +
                      num(symbols) + " symbols");
  c.details.push_back("measured SNR " + num(r.snr_measured_mean) + " vs snr_lb " + num(r.snr_lb) +
                      ", relative gap " + num(rel, 3) + " (need <= 0.05)");
  if (opt.noise_tamper != 1.0) c.details.push_back("noise variance tampered by x" + num(opt.noise_tamper));
  return c;
}

// One run shared by the concentration and energy checks.
const ExperimentResult& random_idc_run(const VerifyOptions& opt, ExperimentSpec& spec_out) {
  static std::map<std::pair<int, unsigned>, std::pair<ExperimentSpec, ExperimentResult>> cache;
  const auto key = std::make_pair(static_cast<int>(opt.level), opt.threads);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const bool full = opt.level == VerifyLevel::full;
    ExperimentSpec spec;
    spec.network = base_network(2, 0.1, full ? 256 : 64, full ? 4096 : 1024);
    spec.codebook.messages = 16;
    spec.trials = full ? 1000 : 300;
    spec.threads = opt.threads;
    ExperimentResult r = run_experiment(spec);
    spec.resolve();
    it = cache.emplace(key, std::make_pair(spec, std::move(r))).first;
  }
  spec_out = it->second.first;
  return it->second.second;
}

CheckResult concentration_check(const VerifyOptions& opt) {
  CheckResult c{6, "concentration and conditional signal floor", true, {}, 0.0};
  ExperimentSpec spec;
  const ExperimentResult& r = random_idc_run(opt, spec);
  const NetworkConfig& cfg = spec.network;
  const double n = static_cast<double>(r.trials);
  const double se = std::sqrt(r.e_idc_freq * (1.0 - r.e_idc_freq) / n);
  const bool a = r.e_idc_freq <= r.e_idc_chebyshev_bound + 3.0 * se;
  const bool b = r.good_trials == 0 || r.min_signal_good >= r.signal_floor;
  c.passed = a && b;
  const double delta = delta_n(cfg.margins.nu, cfg.margins.beta, 1.0, cfg.repetitions);
  c.details.push_back(std::to_string(r.trials) + " trials, N=" + std::to_string(cfg.outer_length) +
                      ", N'=" + std::to_string(cfg.repetitions) + ", nu=" + num(cfg.margins.nu) +
                      ", beta=" + num(cfg.margins.beta) + ", delta=" + num(delta));
  c.details.push_back("(a) E_IDC frequency " + num(r.e_idc_freq) + " vs Chebyshev bound " +
                      num(r.e_idc_chebyshev_bound) + " + 3 s.e. " + num(3.0 * se) +
                      " (4 K sigma2 / N = " + num(r.e_idc_bound) + ")");
  c.details.push_back("(b) " + std::to_string(r.good_trials) + " good trials, min signal " +
                      num(r.min_signal_good) + " vs floor " + num(r.signal_floor) +
                      (r.signal_floor <= 0.0 ? " (floor vacuous: 1 - 4 delta <= 0)" : ""));
  return c;
}

CheckResult energy_check(const VerifyOptions& opt) {
  CheckResult c{7, "energy audit", true, {}, 0.0};
  ExperimentSpec spec;
  const ExperimentResult& r = random_idc_run(opt, spec);
  const NetworkConfig& cfg = spec.network;
  const double n = static_cast<double>(cfg.outer_length);
  const double tol = 1e-9 * n * cfg.source_power;
  if (r.source_energy_max_deviation > tol) c.passed = false;
  c.details.push_back("source: max |E - N P1| over trials " + num(r.source_energy_max_deviation, 3) +
                      " (N P1 = " + num(n * cfg.source_power) + ")");
  for (std::size_t k = 0; k < r.relay_energy_mean.size(); ++k) {
    const double budget = n * cfg.relay_power[k];
    const double limit = budget + 3.0 * r.relay_energy_stderr[k];
    if (r.relay_energy_mean[k] > limit) c.passed = false;
    c.details.push_back("relay " + std::to_string(k + 1) + ": mean energy " +
                        num(r.relay_energy_mean[k]) + " vs N P2 " + num(budget) + " + 3 s.e. " +
                        num(3.0 * r.relay_energy_stderr[k]));
  }
  return c;
}

ExperimentSpec end_to_end_spec(Index n, Index reps, Index trials, unsigned threads) {
  ExperimentSpec spec;
  spec.network = base_network(2, 0.1, n, reps);
  spec.trials = trials;
  spec.threads = threads;
  spec.resolve();
  const double snr = snr_lb(spec.network.source_power, spec.network.relay_power.front(), 2, 1.0,
                            1.0, 1.0);
  const int log2m = rate_matched_log2m(0.8, snr, n, true);
  spec.codebook.messages = log2m < 63 ? std::uint64_t{1} << log2m : 0;
  spec.reference_decoder = [](const OuterCodebook& cb, const Eigen::VectorXd& y) {
    return oracle::brute_force_decode(cb, y);
  };
  return spec;
}

CheckResult end_to_end_check(const VerifyOptions& opt) {
  CheckResult c{8, "end-to-end block error rate", false, {}, 0.0};
  const bool full = opt.level == VerifyLevel::full;
  const ExperimentSpec spec = end_to_end_spec(256, 4096, 1000, opt.threads);
  const double snr = snr_lb(spec.network.source_power, spec.network.relay_power.front(), 2, 1.0,
                            1.0, 1.0);
  const int log2m = rate_matched_log2m(0.8, snr, 256, true);
  c.details.push_back("stated scale: N=256, log2 M = " + std::to_string(log2m));
  try {
    const ExperimentResult r = run_experiment(spec);
    const bool agree = r.reference_agreements && *r.reference_agreements == r.trials;
    c.passed = r.bler.hi < 0.1 && agree;
    c.details.push_back("BLER " + num(r.bler.estimate) + " [" + num(r.bler.lo) + ", " +
                        num(r.bler.hi) + "], oracle agreement " +
                        std::to_string(r.reference_agreements.value_or(0)) + "/" +
                        std::to_string(r.trials));
  } catch (const std::exception& e) {
    c.details.push_back(std::string("not runnable: ") + e.what());
  }

  // Feasible-scale diagnostic; informative only.
  const ExperimentSpec small = end_to_end_spec(64, 1024, full ? 1000 : 200, opt.threads);
  const ExperimentResult d = run_experiment(small);
  c.details.push_back("diagnostic N=64, N'=1024, M=" + std::to_string(d.messages) + ": BLER " +
                      num(d.bler.estimate) + " [" + num(d.bler.lo) + ", " + num(d.bler.hi) +
                      "] over " + std::to_string(d.trials) + " trials, oracle agreement " +
                      std::to_string(d.reference_agreements.value_or(0)) + "/" +
                      std::to_string(d.trials));
  return c;
}

CheckResult unequal_drift_check() {
  CheckResult c{9, "unequal drifts", true, {}, 0.0};
  Engine rng = make_engine(9, 0, Stream::test);
  std::uniform_real_distribution<double> mu_dist(0.5, 2.0);
  double reduce_err = 0.0, tree_err = 0.0;
  for (const auto& p : random_grid(200, 1, 90)) {
    const double mu = mu_dist(rng);
    const std::vector<double> drifts(static_cast<std::size_t>(p.relays), mu);
    const PowerSelection sel = select_powers(p.relays, p.g, p.h, mu);
    const double sym = snr_lb(sel.p1, sel.p2.front(), p.relays, p.g, p.h, mu);
    const double une = snr_lb_unequal(sel.p1, sel.p2, drifts, drifts, p.g, p.h);
    reduce_err = std::max(reduce_err, std::abs(une - sym) / sym);
    reduce_err = std::max(reduce_err, std::abs(mu_tilde(drifts, drifts) - mu) / mu);
  }
  const bool reduces = reduce_err <= 1e-12;
  c.details.push_back("equal drifts: max relative gap to symmetric forms " + num(reduce_err, 3) +
                      " (need <= 1e-12)");

  std::uniform_real_distribution<double> near_one(0.9, 1.1);
  int outside = 0;
  double lo = 1.0, hi = 0.0;
  for (const auto& p : random_grid(1000, 2, 91)) {
    std::vector<double> m1(static_cast<std::size_t>(p.relays)), m2(m1.size());
    for (auto& m : m1) m = near_one(rng);
    for (auto& m : m2) m = near_one(rng);
    const PowerSelection sel = select_powers_unequal(p.relays, p.g, p.h, m1, m2);
    const double s = snr_lb_unequal(sel.p1, sel.p2, m1, m2, p.g, p.h);
    tree_err = std::max(tree_err, std::abs(s - oracle::snr_lb_unequal_tree(sel.p1, sel.p2, m1, m2,
                                                                            p.g, p.h)) / s);
    if (s < 1.0 / 3.0 || s > 0.5) ++outside;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  c.details.push_back("random drifts in [0.9, 1.1], 1000 points: SNR range [" + num(lo) + ", " +
                      num(hi) + "], outside [1/3, 1/2]: " + std::to_string(outside));
  c.details.push_back("expression-tree reference: max relative gap " + num(tree_err, 3));
  c.passed = reduces && outside == 0 && tree_err <= 1e-12;
  return c;
}

CheckResult capacity_consistency_check() {
  CheckResult c{10, "capacity bound consistency", true, {}, 0.0};
  constexpr int kSteps = 41;
  double worst = -std::numeric_limits<double>::infinity();
  long evaluated = 0;
  for (const auto& p : random_grid(200, 2, 10)) {
    const PowerSelection sel = select_powers(p.relays, p.g, p.h, 1.0);
    const double ub = sync_upper_bound(p.relays, p.g, p.h);
    for (int i = 0; i < kSteps; ++i) {
      for (int j = 0; j < kSteps; ++j) {
        const double p1 = sel.p1 * std::pow(10.0, -2.0 + 4.0 * i / (kSteps - 1));
        const double p2 = sel.p2.front() * std::pow(10.0, -2.0 + 4.0 * j / (kSteps - 1));
        const double per_energy =
            capacity_upper_bound(p1, p2, p.relays, p.g, p.h).bits / (p1 + p.relays * p2);
        worst = std::max(worst, per_energy - ub);
        ++evaluated;
      }
    }
  }
  c.passed = worst <= 1e-9;
  c.details.push_back(std::to_string(evaluated) +
                      " power pairs within two decades of the selected powers");
  c.details.push_back("max (bound / energy - sync_ub) = " + num(worst, 3) + " (need <= 1e-9)");
  return c;
}

CheckResult decoder_oracle_study(const VerifyOptions& opt) {
  CheckResult c{0, "decoder agrees with exhaustive search", true, {}, 0.0};
  const Index trials = opt.level == VerifyLevel::full ? 10000 : 2000;
  const OuterCodebook cb = generate_codebook(64, 256, 1.0, 11);
  Engine rng = make_engine(11, 0, Stream::test);
  std::normal_distribution<double> noise(0.0, std::sqrt(1.0 / 0.5));
  std::uniform_int_distribution<Index> pick(0, 63);
  Index errors = 0, oracle_errors = 0, disagreements = 0;
  Eigen::VectorXd y(256);
  for (Index t = 0; t < trials; ++t) {
    const Index m = pick(rng);
    for (Index n = 0; n < 256; ++n) y[n] = cb.words()(n, m) + noise(rng);
    const Index a = ml_decode(cb, y);
    const Index b = oracle::brute_force_decode(cb, y);
    errors += a != m;
    oracle_errors += b != m;
    disagreements += a != b;
  }
  const double nt = static_cast<double>(trials);
  const double pa = errors / nt, pb = oracle_errors / nt;
  const double se = std::sqrt(std::max(pb * (1.0 - pb), 1.0 / nt) / nt);
  c.passed = std::abs(pa - pb) <= 3.0 * se;
  c.details.push_back("SNR 0.5, M=64, N=256, " + std::to_string(trials) + " trials: BLER " +
                      num(pa) + " vs exhaustive " + num(pb) + ", disagreements " +
                      std::to_string(disagreements));
  return c;
}

CheckResult n_scaling_study() {
  CheckResult c{0, "concentration versus N at asymptotic margins", true, {}, 0.0};
  const double sigma2 = 1.0;
  for (Index n : {4, 6, 8}) {
    const Index reps = n * n * n * n;
    const ConcentrationMargins margins = paper_scaling_margins(n);
    const StateDistribution law(IdcParams{1.0, sigma2, StateLaw::three_point});
    Engine rng = make_engine(77, static_cast<std::uint64_t>(n), Stream::test);
    const Index samples = 2000;
    Index bad_channels = 0, bad_pieces = 0;
    for (Index s = 0; s < samples; ++s) {
      const StateSequence seq = sample_states(law, n * reps, rng);
      const Index bad = count_bad_pieces(piece_stats(seq, n, reps), 1.0, reps, margins);
      bad_pieces += bad;
      bad_channels += bad > 0;
    }
    const double piece_freq = static_cast<double>(bad_pieces) / static_cast<double>(samples * n);
    const double piece_bound = 2.0 * sigma2 / static_cast<double>(n * n);
    const double se = std::sqrt(std::max(piece_freq * (1.0 - piece_freq), 1.0 / samples) /
                                static_cast<double>(samples * n));
    const double channel_bound = chebyshev_channel_bound(n, reps, sigma2, margins);
    const double channel_freq = static_cast<double>(bad_channels) / static_cast<double>(samples);
    if (piece_freq > piece_bound + 3.0 * se) c.passed = false;
    if (channel_freq > channel_bound + 3.0 * std::sqrt(std::max(channel_freq * (1 - channel_freq), 1.0 / samples) / samples))
      c.passed = false;
    c.details.push_back("N=" + std::to_string(n) + ", N'=N^4: bad-piece frequency " +
                        num(piece_freq) + " vs 2 sigma2/N^2 = " + num(piece_bound) +
                        "; bad-channel frequency " + num(channel_freq) + " vs " +
                        num(channel_bound));
  }
  return c;
}

}  // namespace

VerifyLevel parse_verify_level(std::string_view name) {
  if (name == "quick") return VerifyLevel::quick;
  if (name == "full") return VerifyLevel::full;
  throw UsageError("unknown verify level '" + std::string(name) + "' (expected quick or full)");
}

CheckResult run_check(int id, const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult c;
  try {
    switch (id) {
      case 1: c = gamma_check(); break;
      case 2: c = ratio_check(); break;
      case 3: c = snr_interval_check(); break;
      case 4: c = noiseless_check(); break;
      case 5: c = snr_floor_check(opt); break;
      case 6: c = concentration_check(opt); break;
      case 7: c = energy_check(opt); break;
      case 8: c = end_to_end_check(opt); break;
      case 9: c = unequal_drift_check(); break;
      case 10: c = capacity_consistency_check(); break;
      default: throw UsageError("no check numbered " + std::to_string(id));
    }
  } catch (const UsageError& e) {
    if (id < 1 || id > kCheckCount) throw;
    c = CheckResult{id, "check " + std::to_string(id), false, {std::string("error: ") + e.what()}, 0.0};
  } catch (const std::exception& e) {
    c = CheckResult{id, "check " + std::to_string(id), false, {std::string("error: ") + e.what()}, 0.0};
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

std::vector<CheckResult> run_studies(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  auto timed = [&](auto&& f) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult c = f();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(c));
  };
  timed([&] { return decoder_oracle_study(opt); });
  if (opt.level == VerifyLevel::full) timed([] { return n_scaling_study(); });
  return out;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  for (int id = 1; id <= kCheckCount; ++id) out.push_back(run_check(id, opt));
  for (auto& s : run_studies(opt)) out.push_back(std::move(s));
  return out;
}

void print_check(std::ostream& os, const CheckResult& c) {
  os << (c.passed ? "PASS" : "FAIL") << ' ';
  if (c.id > 0) os << "[" << c.id << "] ";
  os << c.name << " (" << std::fixed << std::setprecision(2) << c.seconds << " s)"
     << std::defaultfloat << '\n';
  for (const auto& d : c.details) os << "    " << d << '\n';
}

}  // namespace udn
