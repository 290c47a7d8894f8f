#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace udn {

/// A real-valued symbol sequence.
template <typename Scalar>
using Sequence = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Several sequences propagated side by side, one per column. The diamond
/// pipeline uses one lane per component (received, signal-only, noise-only)
/// so that every lane sees identical channel states.
template <typename Scalar>
using Lanes = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Parameters that cannot be realised (bad moments, bad gains, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller violated a precondition (length mismatch, bad arguments).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Formula evaluated outside the range where it is stated.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace udn
