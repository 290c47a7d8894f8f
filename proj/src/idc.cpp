#include "udn/idc.hpp"

#include <cmath>
#include <sstream>

namespace udn {

namespace {

constexpr double kMomentTol = 1e-12;

double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string describe(const IdcParams& p) {
  std::ostringstream os;
  os << to_string(p.law) << " law with mu=" << p.mu << ", sigma2=" << p.sigma2;
  return os.str();
}

}  // namespace

StateLaw parse_state_law(std::string_view name) {
  if (name == "three_point") return StateLaw::three_point;
  if (name == "poisson") return StateLaw::poisson;
  if (name == "geometric") return StateLaw::geometric;
  throw ConfigError("unknown state law '" + std::string(name) +
                    "' (expected three_point, poisson or geometric)");
}

std::string_view to_string(StateLaw law) {
  switch (law) {
    case StateLaw::three_point: return "three_point";
    case StateLaw::poisson: return "poisson";
    case StateLaw::geometric: return "geometric";
  }
  return "unknown";
}

StateDistribution::StateDistribution(const IdcParams& params) : params_(params) {
  const double mu = params.mu;
  const double s2 = params.sigma2;
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ConfigError(describe(params) + ": mu must be positive and finite");
  }
  if (!(s2 >= 0.0) || !std::isfinite(s2)) {
    throw ConfigError(describe(params) + ": sigma2 must be nonnegative and finite");
  }

  switch (params.law) {
    case StateLaw::three_point: {
      // p1 + 2 p2 = mu, p1 + 4 p2 = sigma2 + mu^2.
      double p2 = (s2 + mu * mu - mu) / 2.0;
      double p1 = 2.0 * mu - s2 - mu * mu;
      double p0 = 1.0 - p1 - p2;
      if (p0 < -kMomentTol || p1 < -kMomentTol || p2 < -kMomentTol) {
        const double lo = std::max({0.0, mu - mu * mu, (mu - 1.0) * (2.0 - mu)});
        const double hi = 2.0 * mu - mu * mu;
        std::ostringstream os;
        os << describe(params) << " is not realisable: ";
        if (mu > 2.0 || hi < lo) {
          os << "the three-point law on {0,1,2} needs 0 < mu <= 2";
        } else {
          os << "for mu=" << mu << " sigma2 must lie in [" << lo << ", " << hi << "]";
        }
        throw ConfigError(os.str());
      }
      p0 = std::max(p0, 0.0);
      p1 = std::max(p1, 0.0);
      c0_ = p0;
      c1_ = p0 + p1;
      if (p0 > 1.0 - kMomentTol) deterministic_value_ = 0;
      if (p1 > 1.0 - kMomentTol) deterministic_value_ = 1;
      if (p2 > 1.0 - kMomentTol) deterministic_value_ = 2;
      break;
    }
    case StateLaw::poisson: {
      if (std::abs(s2 - mu) > kMomentTol * std::max(1.0, mu)) {
        std::ostringstream os;
        os << describe(params) << " is not realisable: the Poisson law forces sigma2 == mu (" << mu
           << ")";
        throw ConfigError(os.str());
      }
      break;
    }
    case StateLaw::geometric: {
      const double floor = std::abs(mu * (mu - 1.0));
      if (s2 < floor - kMomentTol) {
        std::ostringstream os;
        os << describe(params) << " is not realisable: the geometric law needs sigma2 >= "
           << floor << " for mu=" << mu;
        throw ConfigError(os.str());
      }
      const double r = std::max(1.0, (s2 + mu * mu + mu) / (2.0 * mu));
      p_ = 1.0 - 1.0 / r;
      w_ = std::min(1.0, mu / r);
      if (w_ == 1.0 && p_ == 0.0) deterministic_value_ = 1;
      break;
    }
  }
}

double StateDistribution::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  switch (params_.law) {
    case StateLaw::three_point:
      if (k == 0) return c0_;
      if (k == 1) return c1_ - c0_;
      if (k == 2) return 1.0 - c1_;
      return 0.0;
    case StateLaw::poisson:
      return std::exp(static_cast<double>(k) * std::log(params_.mu) - params_.mu -
                      std::lgamma(static_cast<double>(k) + 1.0));
    case StateLaw::geometric:
      if (k == 0) return 1.0 - w_;
      return w_ * (1.0 - p_) * std::pow(p_, static_cast<double>(k - 1));
  }
  return 0.0;
}

double StateDistribution::mean() const {
  switch (params_.law) {
    case StateLaw::three_point: return (c1_ - c0_) + 2.0 * (1.0 - c1_);
    case StateLaw::poisson: return params_.mu;
    case StateLaw::geometric: return w_ / (1.0 - p_);
  }
  return 0.0;
}

double StateDistribution::variance() const {
  const double m = mean();
  switch (params_.law) {
    case StateLaw::three_point: return (c1_ - c0_) + 4.0 * (1.0 - c1_) - m * m;
    case StateLaw::poisson: return params_.mu;
    case StateLaw::geometric: {
      const double r = 1.0 / (1.0 - p_);
      return w_ * (2.0 * r * r - r) - m * m;
    }
  }
  return 0.0;
}

std::int32_t StateDistribution::sample(Engine& rng) const {
  if (deterministic_value_ >= 0) return deterministic_value_;
  switch (params_.law) {
    case StateLaw::three_point: {
      const double u = uniform01(rng);
      return u < c0_ ? 0 : (u < c1_ ? 1 : 2);
    }
    case StateLaw::poisson: {
      std::poisson_distribution<std::int32_t> d(params_.mu);
      return d(rng);
    }
    case StateLaw::geometric: {
      if (uniform01(rng) >= w_) return 0;
      std::geometric_distribution<std::int32_t> d(1.0 - p_);
      return 1 + d(rng);
    }
  }
  return 0;
}

StateSequence sample_states(const StateDistribution& law, Index length, Engine& rng) {
  if (length < 1) throw UsageError("sample_states: length must be at least 1");
  StateSequence seq;
  seq.states.resize(length);
  if (law.deterministic()) {
    seq.states.setConstant(law.sample(rng));
    return seq;
  }
  for (Index t = 0; t < length; ++t) seq.states[t] = law.sample(rng);
  return seq;
}

StateSequence sample_states(const IdcParams& params, Index length, Engine& rng) {
  return sample_states(StateDistribution(params), length, rng);
}

PieceStats piece_stats(const StateSequence& states, Index pieces, Index piece_width) {
  if (pieces < 1 || piece_width < 1 || states.size() != pieces * piece_width) {
    throw UsageError("piece_stats: state sequence length " + std::to_string(states.size()) +
                     " is not N*N' = " + std::to_string(pieces) + "*" +
                     std::to_string(piece_width));
  }
  PieceStats stats;
  stats.start.resize(pieces);
  stats.length.resize(pieces);
  std::int64_t prefix = 0;
  for (Index n = 0; n < pieces; ++n) {
    const std::int64_t len =
        states.states.segment(n * piece_width, piece_width).cast<std::int64_t>().sum();
    stats.start[n] = prefix + 1;
    stats.length[n] = len;
    prefix += len;
  }
  return stats;
}

ConcentrationMargins paper_scaling_margins(Index n) {
  const double nd = static_cast<double>(n);
  return {std::pow(nd, 3.5), std::pow(nd, 3.0)};
}

ConcentrationMargins desk_margins(Index n, Index piece_width, double sigma2, double c) {
  const double np = static_cast<double>(piece_width);
  return {c * std::sqrt(static_cast<double>(n) * np * sigma2), c * std::sqrt(np * sigma2)};
}

Index count_bad_pieces(const PieceStats& stats, double mu, Index piece_width,
                       const ConcentrationMargins& margins) {
  const double width = mu * static_cast<double>(piece_width);
  Index bad = 0;
  for (Index n = 0; n < stats.pieces(); ++n) {
    const double centre = static_cast<double>(n) * width + 1.0;
    const bool start_ok = std::abs(static_cast<double>(stats.start[n]) - centre) < margins.nu;
    const bool length_ok = std::abs(static_cast<double>(stats.length[n]) - width) < margins.beta;
    if (!(start_ok && length_ok)) ++bad;
  }
  return bad;
}

bool is_idc_good(const PieceStats& stats, double mu, Index piece_width,
                 const ConcentrationMargins& margins) {
  return count_bad_pieces(stats, mu, piece_width, margins) == 0;
}

double chebyshev_channel_bound(Index pieces, Index piece_width, double sigma2,
                               const ConcentrationMargins& margins) {
  if (!(margins.nu > 0.0) || !(margins.beta > 0.0)) return 1.0;
  const double np = static_cast<double>(piece_width);
  const double n = static_cast<double>(pieces);
  // sum_{n=1}^{N} (n-1) = N(N-1)/2
  const double starts = n * (n - 1.0) / 2.0 * np * sigma2 / (margins.nu * margins.nu);
  const double lengths = n * np * sigma2 / (margins.beta * margins.beta);
  return std::min(1.0, starts + lengths);
}

}  // namespace udn
