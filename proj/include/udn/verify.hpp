#pragma once

// Self-check suite: the numbered acceptance checks plus supporting studies.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace udn {

enum class VerifyLevel { quick, full };

VerifyLevel parse_verify_level(std::string_view name);

struct CheckResult {
  int id = 0;  // 1..10 for the numbered checks, 0 for supporting studies
  std::string name;
  bool passed = false;
  std::vector<std::string> details;  // measured vs bound, one fact per line
  double seconds = 0.0;
};

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::quick;
  unsigned threads = 0;
  // Multiplies every channel noise variance. 1 in normal use; any other value
  // deliberately breaks the SNR-floor check (harness self-test).
  double noise_tamper = 1.0;
};

inline constexpr int kCheckCount = 10;

/// Runs numbered check `id` (1..kCheckCount). At quick level the
/// simulation-heavy checks run at reduced scale.
CheckResult run_check(int id, const VerifyOptions& options);

/// Checks that only exist as supporting studies: decoder oracle agreement
/// and, at full level, the N-scaling concentration study.
std::vector<CheckResult> run_studies(const VerifyOptions& options);

/// Every numbered check then the studies, in order.
std::vector<CheckResult> run_verify(const VerifyOptions& options);

void print_check(std::ostream& os, const CheckResult& check);

}  // namespace udn
