#pragma once

// Outer random antipodal code, inner attenuated repetition code, the
// block-averaging front end and the interleaver.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "udn/common.hpp"

namespace udn {

/// M random codewords over {-sqrt(P1), +sqrt(P1)}^N, stored one per column.
class OuterCodebook {
 public:
  OuterCodebook() = default;
  OuterCodebook(std::uint64_t messages, Index length, double power, std::uint64_t seed,
                Eigen::MatrixXd words);

  std::uint64_t messages() const { return messages_; }
  Index length() const { return length_; }
  double power() const { return power_; }
  std::uint64_t seed() const { return seed_; }

  /// N x M matrix, column m is codeword m.
  const Eigen::MatrixXd& words() const { return words_; }
  auto codeword(Index m) const { return words_.col(m); }

  /// M > 2^N: codewords cannot all be distinct, so decoding is ambiguous.
  bool may_collide() const;

 private:
  std::uint64_t messages_ = 0;
  Index length_ = 0;
  double power_ = 0.0;
  std::uint64_t seed_ = 0;
  Eigen::MatrixXd words_;
};

/// Bytes needed to hold an M x N codebook in memory.
double codebook_bytes(double messages, Index length);

/// i.i.d. uniform antipodal symbols, reproducible from (M, N, P1, seed).
/// Throws UsageError for M < 2, N < 1 or P1 <= 0.
OuterCodebook generate_codebook(std::uint64_t messages, Index length, double power,
                                std::uint64_t seed);

/// Sidecar layout (little endian):
///   char[8]  magic "UDNCB\x01\0\0"
///   uint64   M
///   uint64   N
///   float64  P1
///   uint64   seed
///   sign bits, codeword-major (all N bits of codeword 0, then codeword 1,
///   ...), packed LSB-first into bytes; bit = 1 means +sqrt(P1). The final
///   byte is zero-padded.
void save_codebook(const OuterCodebook& cb, const std::filesystem::path& path);
OuterCodebook load_codebook(const std::filesystem::path& path);

struct RepetitionParams {
  Index repetitions = 1;  // N'
  double scale = 1.0;     // 1/sqrt(N') at the source, alpha_k/sqrt(N'_k) at relay k
};

/// Row n of `u` repeated N' times and multiplied by `scale`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> inner_encode(
    const Eigen::MatrixBase<Derived>& u, const RepetitionParams& p) {
  if (p.repetitions < 1 || !(p.scale > 0.0)) {
    throw UsageError("inner_encode: need N' >= 1 and scale > 0");
  }
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(u.rows() * p.repetitions,
                                                                        u.cols());
  const Scalar scale = static_cast<Scalar>(p.scale);
  for (Index c = 0; c < u.cols(); ++c) {
    for (Index n = 0; n < u.rows(); ++n) {
      out.col(c).segment(n * p.repetitions, p.repetitions).setConstant(scale * u(n, c));
    }
  }
  return out;
}

/// Boundary of block n (0-based) for real block width W: floor(n W).
/// Cumulative flooring keeps the total length at floor(N W).
inline Index block_boundary(Index n, double width) {
  return static_cast<Index>(std::floor(static_cast<double>(n) * width));
}

/// out[n] = (1/sqrt(W)) * sum of y over block n. Requires W >= 1 and at least
/// floor(N W) input rows.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> block_average(
    const Eigen::MatrixBase<Derived>& y, Index blocks, double width) {
  if (!(width >= 1.0) || blocks < 1) {
    throw UsageError("block_average: need N >= 1 and block width >= 1");
  }
  if (y.rows() < block_boundary(blocks, width)) {
    throw UsageError("block_average: input has " + std::to_string(y.rows()) + " rows, need " +
                     std::to_string(block_boundary(blocks, width)));
  }
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(blocks, y.cols());
  const Scalar norm = static_cast<Scalar>(1.0 / std::sqrt(width));
  for (Index n = 0; n < blocks; ++n) {
    const Index lo = block_boundary(n, width);
    const Index hi = block_boundary(n + 1, width);
    out.row(n) = norm * y.middleRows(lo, hi - lo).colwise().sum();
  }
  return out;
}

/// Position in the interleaved sequence of element i. Elements are written
/// row-major into rows of `depth` columns and read column-major; an
/// incomplete last row is skipped over rather than padded.
Index interleaved_position(Index i, Index length, Index depth);

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> interleave(
    const Eigen::MatrixBase<Derived>& u, Index depth) {
  if (depth < 1) throw UsageError("interleave: depth must be at least 1");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(u.rows(),
                                                                                       u.cols());
  for (Index i = 0; i < u.rows(); ++i) out.row(interleaved_position(i, u.rows(), depth)) = u.row(i);
  return out;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> deinterleave(
    const Eigen::MatrixBase<Derived>& u, Index depth) {
  if (depth < 1) throw UsageError("deinterleave: depth must be at least 1");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> out(u.rows(),
                                                                                       u.cols());
  for (Index i = 0; i < u.rows(); ++i) out.row(i) = u.row(interleaved_position(i, u.rows(), depth));
  return out;
}

/// Index maximising <uhat, codeword_m>; lowest index wins ties. For
/// equal-energy codewords this is the minimum-distance (ML) rule on the
/// effective AWGN channel.
Index ml_decode(const OuterCodebook& cb, const Eigen::Ref<const Eigen::VectorXd>& uhat);

}  // namespace udn
