#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace udn {

using Engine = std::mt19937_64;

/// Independent random streams used inside one trial.
enum class Stream : std::uint32_t {
  message = 1,
  codebook = 2,
  first_hop_states = 3,
  second_hop_states = 4,
  relay_noise = 5,
  destination_noise = 6,
  test = 99,
};

/// Engine for (master seed, trial, stream, index). Distinct tuples give
/// statistically independent streams; equal tuples give identical ones.
inline Engine make_engine(std::uint64_t master_seed, std::uint64_t trial, Stream stream,
                          std::uint32_t index = 0) {
  const std::array<std::uint32_t, 6> words{
      static_cast<std::uint32_t>(master_seed),
      static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(trial),
      static_cast<std::uint32_t>(trial >> 32),
      static_cast<std::uint32_t>(stream),
      index,
  };
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace udn
