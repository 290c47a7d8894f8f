#include "udn/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace udn {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw UsageError(std::string(what) + " must be positive and finite");
  }
}

void require_relays(int relays) {
  if (relays < 1) throw UsageError("K must be at least 1");
}

// 15-point Kronrod rule with its embedded 7-point Gauss rule on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel kronrod_panel(F&& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double centre = f(mid);
  double kronrod = centre * kKronrodWeights[7];
  double gauss = centre * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Globally adaptive: always bisect the panel with the largest error.
template <typename F>
double integrate(F&& f, double lo, double hi, double tol, int max_panels) {
  std::priority_queue<Panel> panels;
  constexpr int kInitial = 16;
  double value = 0.0, error = 0.0;
  for (int i = 0; i < kInitial; ++i) {
    const double a = lo + (hi - lo) * i / kInitial;
    const double b = lo + (hi - lo) * (i + 1) / kInitial;
    Panel p = kronrod_panel(f, a, b);
    value += p.value;
    error += p.error;
    panels.push(p);
  }
  while (error > tol) {
    if (static_cast<int>(panels.size()) >= max_panels) {
      throw DomainError("quadrature budget exhausted before reaching tolerance " +
                        std::to_string(tol) + " (estimated error " + std::to_string(error) + ")");
    }
    const Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = kronrod_panel(f, worst.lo, mid);
    const Panel right = kronrod_panel(f, mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed the cancellation accumulated by the running updates.
  value = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    panels.pop();
  }
  return value;
}

const GammaConstant& default_gamma() {
  static const GammaConstant gamma = gamma_constant();
  return gamma;
}

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

double min_cut_metric(int relays, double g, double h) {
  require_relays(relays);
  require_positive(g, "g");
  require_positive(h, "h");
  const double k = relays;
  return std::min({k * g, std::sqrt(k * g * h), k * h});
}

double sync_upper_bound(int relays, double g, double h) {
  return 2.0 / std::numbers::ln2 * min_cut_metric(relays, g, h);
}

double unsync_lower_bound(int relays, double g, double h, double mu) {
  require_positive(mu, "mu");
  return mu / 10.0 * min_cut_metric(relays, g, h);
}

CapacityBound capacity_upper_bound(double p1, double p2, int relays, double g, double h) {
  if (relays < 2) {
    throw DomainError(
        "capacity_upper_bound is stated for K >= 2; single-relay capacity bounds are out of scope");
  }
  if (p1 < 0.0 || p2 < 0.0) throw UsageError("powers must be nonnegative");
  require_positive(g, "g");
  require_positive(h, "h");
  const double k = relays;
  const double a = p1 * g;  // P1 g
  const double b = p2 * h;  // P2 h
  if (std::max(a, k * b) >= 1.0) {
    return {0.5 * std::log2(1.0 + k * std::min(a, k * b)), 1};
  }
  if (a <= b) return {0.5 * std::log2(1.0 + k * a), 2};
  const double beam = k * std::sqrt(a * b);
  if (a > b && a < k * k * b) {
    if (beam >= 1.0) return {0.5 * std::log2(1.0 + 2.0 * beam * beam) + 0.5, 3};
    return {std::log2(1.0 + 2.0 * beam), 4};
  }
  return {0.5 * std::log2(1.0 + k * k * b), 5};
}

double snr_lb(double p1, double p2, int relays, double g, double h, double mu) {
  require_relays(relays);
  const double k = relays;
  return k * k * mu * mu * p1 * p2 * g * h / (1.0 + mu * g * p1 + k * mu * h * p2);
}

double snr_lb_unequal(double p1, std::span<const double> p2, std::span<const double> mu_first,
                      std::span<const double> mu_second, double g, double h) {
  if (p2.size() != mu_first.size() || p2.size() != mu_second.size() || p2.empty()) {
    throw UsageError("snr_lb_unequal: P2k, mu1k and mu2k must have K >= 1 entries each");
  }
  double amplitude = 0.0;
  double forwarded_noise = 0.0;
  for (std::size_t k = 0; k < p2.size(); ++k) {
    const double alpha = std::sqrt(p2[k] / (1.0 + mu_first[k] * g * p1));
    amplitude += alpha * std::sqrt(mu_first[k] * mu_second[k] * g * h);
    forwarded_noise += mu_second[k] * alpha * alpha;
  }
  return amplitude * amplitude * p1 / (1.0 + h * forwarded_noise);
}

Regime classify_regime(int relays, double g, double h) {
  require_relays(relays);
  const double k = relays;
  if (h < g / k) return Regime::mac_limited;
  if (h < k * g) return Regime::intermediate;
  return Regime::bc_limited;
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::mac_limited: return "MAC-limited";
    case Regime::intermediate: return "intermediate";
    case Regime::bc_limited: return "BC-limited";
  }
  return "unknown";
}

PowerSelection select_powers(int relays, double g, double h, double mu) {
  require_positive(mu, "mu");
  const std::vector<double> drifts(static_cast<std::size_t>(std::max(relays, 1)), mu);
  return select_powers_unequal(relays, g, h, drifts, drifts);
}

PowerSelection select_powers_unequal(int relays, double g, double h,
                                     std::span<const double> mu_first,
                                     std::span<const double> mu_second) {
  require_relays(relays);
  require_positive(g, "g");
  require_positive(h, "h");
  const auto count = static_cast<std::size_t>(relays);
  if (mu_first.size() != count || mu_second.size() != count) {
    throw UsageError("drift lists must have K entries");
  }
  for (double m : mu_first) require_positive(m, "first-hop drift");
  for (double m : mu_second) require_positive(m, "second-hop drift");

  const double k = relays;
  const double mu_min = *std::min_element(mu_first.begin(), mu_first.end());
  PowerSelection sel;
  sel.regime = classify_regime(relays, g, h);
  sel.p2.resize(count);
  switch (sel.regime) {
    case Regime::mac_limited:
      sel.p1 = 1.0 / (mu_min * g);
      for (std::size_t i = 0; i < count; ++i) sel.p2[i] = 1.0 / (mu_second[i] * k * k * h);
      break;
    case Regime::intermediate:
      sel.p1 = 1.0 / (mu_min * std::sqrt(k * g * h));
      for (std::size_t i = 0; i < count; ++i) {
        sel.p2[i] = 1.0 / (mu_second[i] * std::sqrt(k * k * k * g * h));
      }
      break;
    case Regime::bc_limited:
      sel.p1 = 1.0 / (mu_min * k * g);
      for (std::size_t i = 0; i < count; ++i) sel.p2[i] = 1.0 / (mu_second[i] * k * h);
      break;
  }
  return sel;
}

double awgn_capacity(double snr) {
  if (snr < 0.0) throw UsageError("snr must be nonnegative");
  return 0.5 * std::log2(1.0 + snr);
}

double bpsk_awgn_capacity(double snr, double tol) {
  if (!(snr >= 0.0) || !std::isfinite(snr)) throw UsageError("snr must be nonnegative and finite");
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  if (snr == 0.0) return 0.0;
  // I = 1 - E[log2(1 + exp(-2 a Y))], Y = a + Z, Z ~ N(0, 1), a = sqrt(snr).
  // Outside |z| <= 12 the Gaussian weight is below 1e-31.
  const double a = std::sqrt(snr);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  auto integrand = [&](double z) {
    return inv_sqrt_2pi * std::exp(-0.5 * z * z) * softplus(-2.0 * a * (a + z)) /
           std::numbers::ln2;
  };
  constexpr int kPanelBudget = 4000;
  const double penalty = integrate(integrand, -12.0, 12.0, tol, kPanelBudget);
  return std::clamp(1.0 - penalty, 0.0, 1.0);
}

GammaConstant gamma_constant(double tol) {
  constexpr int kPoints = 101;
  GammaConstant out;
  out.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) {
    const double snr = 1.0 / 3.0 + (0.5 - 1.0 / 3.0) * i / (kPoints - 1);
    const double ratio = bpsk_awgn_capacity(snr, tol) / awgn_capacity(snr);
    if (ratio < out.value) {
      out.value = ratio;
      out.argmin_snr = snr;
    }
    if (i == kPoints - 1) out.ratio_at_half = ratio;
  }
  out.attained_at_half = out.argmin_snr == 0.5;
  return out;
}

double achievable_rpue(int relays, double g, double h, double mu) {
  require_positive(mu, "mu");
  const double rate = default_gamma().value * mu * std::log2(4.0 / 3.0) / 4.0 * min_cut_metric(relays, g, h);
  if (rate < unsync_lower_bound(relays, g, h, mu)) {
    throw std::logic_error("achievable rate per unit energy fell below mu/10 * min-cut");
  }
  return rate;
}

double mu_tilde(std::span<const double> mu_first, std::span<const double> mu_second) {
  if (mu_first.empty() || mu_first.size() != mu_second.size()) {
    throw UsageError("mu_tilde: drift lists must be nonempty and of equal length");
  }
  const double mu_min = *std::min_element(mu_first.begin(), mu_first.end());
  double inv_sum = 0.0;
  for (double m : mu_second) inv_sum += 1.0 / m;
  return 2.0 / (1.0 / mu_min + inv_sum / static_cast<double>(mu_second.size()));
}

double e_idc_probability_bound(int relays, Index outer_length, double sigma2) {
  require_relays(relays);
  if (outer_length < 1) throw UsageError("N must be at least 1");
  return std::min(1.0, 4.0 * relays * sigma2 / static_cast<double>(outer_length));
}

double delta_n(double nu, double beta, double mu, Index repetitions) {
  require_positive(mu, "mu");
  return (nu + beta) / (mu * static_cast<double>(repetitions));
}

bool amgm_check(int relays, double g, double h) {
  const double k = relays;
  return k * g / (1.0 + k * g / h) <= std::sqrt(k * g * h) / 2.0;
}

BoundsReport bounds_report(int relays, double g, double h, double mu) {
  BoundsReport r;
  r.relays = relays;
  r.g = g;
  r.h = h;
  r.mu = mu;
  r.min_cut_metric = min_cut_metric(relays, g, h);
  r.sync_ub = sync_upper_bound(relays, g, h);
  r.unsync_lb = unsync_lower_bound(relays, g, h, mu);
  r.ratio = r.sync_ub / r.unsync_lb;
  r.powers = select_powers(relays, g, h, mu);
  r.regime = r.powers.regime;
  r.snr_lb = snr_lb(r.powers.p1, r.powers.p2.front(), relays, g, h, mu);
  r.gamma = default_gamma().value;
  r.achievable_rpue = achievable_rpue(relays, g, h, mu);
  return r;
}

BoundsReport bounds_report(int relays, double g, double h, std::span<const double> mu_first,
                           std::span<const double> mu_second) {
  BoundsReport r;
  r.relays = relays;
  r.g = g;
  r.h = h;
  r.powers = select_powers_unequal(relays, g, h, mu_first, mu_second);
  r.mu = mu_tilde(mu_first, mu_second);
  r.min_cut_metric = min_cut_metric(relays, g, h);
  r.sync_ub = sync_upper_bound(relays, g, h);
  r.unsync_lb = unsync_lower_bound(relays, g, h, r.mu);
  r.ratio = r.sync_ub / r.unsync_lb;
  r.regime = r.powers.regime;
  r.snr_lb = snr_lb_unequal(r.powers.p1, r.powers.p2, mu_first, mu_second, g, h);
  r.gamma = default_gamma().value;
  // Rate per unit energy of the scheme at the selected per-relay powers.
  const double spent = r.powers.p1 + std::accumulate(r.powers.p2.begin(), r.powers.p2.end(), 0.0);
  r.achievable_rpue = r.gamma * awgn_capacity(r.snr_lb) / spent;
  return r;
}

std::string to_json(const BoundsReport& report, int indent) {
  nlohmann::ordered_json j;
  j["K"] = report.relays;
  j["g"] = report.g;
  j["h"] = report.h;
  j["mu"] = report.mu;
  j["min_cut_metric"] = report.min_cut_metric;
  j["sync_ub"] = report.sync_ub;
  j["unsync_lb"] = report.unsync_lb;
  j["ratio"] = report.ratio;
  j["regime"] = std::string(to_string(report.regime));
  j["P1"] = report.powers.p1;
  j["P2"] = report.powers.p2;
  j["snr_lb"] = report.snr_lb;
  j["gamma"] = report.gamma;
  j["achievable_rpue"] = report.achievable_rpue;
  return j.dump(indent);
}

}  // namespace udn
