#pragma once

// Insertion/deletion channel: each input symbol x[t] is emitted s[t] times,
// with s[t] i.i.d. on {0, 1, 2, ...} with mean mu (clock drift) and
// variance sigma2 (clock jitter).

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "udn/common.hpp"
#include "udn/rng.hpp"

namespace udn {

/// Distribution family used to realise the state moments (mu, sigma2).
///  - three_point: support {0, 1, 2}.
///  - poisson: Poisson(mu); forces sigma2 == mu.
///  - geometric: zero-modified shifted geometric. s = 0 with probability
///    1 - w, otherwise 1 + G with G ~ Geometric(p) on {0, 1, ...}; (w, p)
///    are fitted to (mu, sigma2). Feasible iff sigma2 >= |mu (mu - 1)|.
enum class StateLaw { three_point, poisson, geometric };

StateLaw parse_state_law(std::string_view name);
std::string_view to_string(StateLaw law);

struct IdcParams {
  double mu = 1.0;
  double sigma2 = 0.0;
  StateLaw law = StateLaw::three_point;
};

/// A validated state distribution. Construction throws ConfigError when the
/// requested moments are not realisable by the chosen family; the message
/// names the feasible range.
class StateDistribution {
 public:
  explicit StateDistribution(const IdcParams& params);

  const IdcParams& params() const { return params_; }

  /// Probability of emitting the input symbol `k` times.
  double pmf(std::int64_t k) const;
  /// Analytic moments of the fitted law.
  double mean() const;
  double variance() const;
  /// True when every draw equals the same integer (sigma2 == 0).
  bool deterministic() const { return deterministic_value_ >= 0; }

  std::int32_t sample(Engine& rng) const;

 private:
  IdcParams params_;
  std::int32_t deterministic_value_ = -1;
  // three_point: cumulative probabilities of 0 and 1.
  double c0_ = 0.0, c1_ = 0.0;
  // geometric: probability of a nonzero draw, continuation probability.
  double w_ = 0.0, p_ = 0.0;
};

using StateVector = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 1>;

struct StateSequence {
  StateVector states;

  Index size() const { return states.size(); }
  /// Output length of the channel this sequence drives.
  std::int64_t total() const { return states.cast<std::int64_t>().sum(); }
};

StateSequence sample_states(const IdcParams& params, Index length, Engine& rng);
StateSequence sample_states(const StateDistribution& law, Index length, Engine& rng);

/// Start (1-based index into the channel output) and length of every output
/// piece, where input piece n covers input positions ((n-1)N'+1 .. nN').
struct PieceStats {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> start;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> length;

  Index pieces() const { return start.size(); }
};

PieceStats piece_stats(const StateSequence& states, Index pieces, Index piece_width);

/// Half-widths of the concentration windows for piece starts (nu) and piece
/// lengths (beta).
struct ConcentrationMargins {
  double nu = 0.0;
  double beta = 0.0;
};

/// nu = N^{7/2}, beta = N^3 (the asymptotic scaling, meant for N' = N^4).
ConcentrationMargins paper_scaling_margins(Index n);
/// nu = c sqrt(N N' sigma2), beta = c sqrt(N' sigma2).
ConcentrationMargins desk_margins(Index n, Index piece_width, double sigma2, double c = 4.0);

/// True iff every piece starts strictly inside ((n-1) mu N' + 1 -/+ nu) and
/// has length strictly inside (mu N' -/+ beta). Boundaries count as bad.
bool is_idc_good(const PieceStats& stats, double mu, Index piece_width,
                 const ConcentrationMargins& margins);

/// Number of pieces violating either window.
Index count_bad_pieces(const PieceStats& stats, double mu, Index piece_width,
                       const ConcentrationMargins& margins);

/// Chebyshev bound on the probability that one channel with N pieces of
/// width N' has any bad piece:
///   sum_n [(n-1) N' sigma2 / nu^2 + N' sigma2 / beta^2], capped at 1.
double chebyshev_channel_bound(Index pieces, Index piece_width, double sigma2,
                               const ConcentrationMargins& margins);

/// Concatenation, in input order, of states[t] copies of row t of `input`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> apply_idc(
    const Eigen::MatrixBase<Derived>& input, const StateSequence& s) {
  if (input.rows() != s.size()) {
    throw UsageError("apply_idc: input has " + std::to_string(input.rows()) +
                     " symbols but the state sequence has " + std::to_string(s.size()));
  }
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(
      static_cast<Index>(s.total()), input.cols());
  for (Index c = 0; c < input.cols(); ++c) {
    Index pos = 0;
    for (Index t = 0; t < s.size(); ++t) {
      const Index reps = s.states[t];
      out.col(c).segment(pos, reps).setConstant(input(t, c));
      pos += reps;
    }
  }
  return out;
}

/// First `length` rows of `seq`, zero-padded when `seq` is shorter.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> truncate_pad(
    const Eigen::MatrixBase<Derived>& seq, Index length) {
  using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>;
  Out out = Out::Zero(length, seq.cols());
  const Index keep = std::min(length, seq.rows());
  out.topRows(keep) = seq.topRows(keep);
  return out;
}

/// truncate_pad(apply_idc(input, s), length) without materialising the
/// untruncated output.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
apply_idc_truncated(const Eigen::MatrixBase<Derived>& input, const StateSequence& s, Index length) {
  if (input.rows() != s.size()) {
    throw UsageError("apply_idc: input has " + std::to_string(input.rows()) +
                     " symbols but the state sequence has " + std::to_string(s.size()));
  }
  using Out = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>;
  Out out = Out::Zero(length, input.cols());
  for (Index c = 0; c < input.cols(); ++c) {
    Index pos = 0;
    for (Index t = 0; t < s.size() && pos < length; ++t) {
      const Index reps = std::min<Index>(s.states[t], length - pos);
      out.col(c).segment(pos, reps).setConstant(input(t, c));
      pos += reps;
    }
  }
  return out;
}

}  // namespace udn
