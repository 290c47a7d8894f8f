#include "udn/coding.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "udn/rng.hpp"

namespace udn {

namespace {

constexpr std::array<char, 8> kMagic{'U', 'D', 'N', 'C', 'B', '\x01', '\0', '\0'};

template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "sidecar I/O assumes little endian");
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw UsageError("codebook file truncated");
  return value;
}

}  // namespace

OuterCodebook::OuterCodebook(std::uint64_t messages, Index length, double power,
                             std::uint64_t seed, Eigen::MatrixXd words)
    : messages_(messages), length_(length), power_(power), seed_(seed), words_(std::move(words)) {}

bool OuterCodebook::may_collide() const {
  return length_ < 64 && messages_ > (std::uint64_t{1} << length_);
}

double codebook_bytes(double messages, Index length) {
  return messages * static_cast<double>(length) * sizeof(double);
}

OuterCodebook generate_codebook(std::uint64_t messages, Index length, double power,
                                std::uint64_t seed) {
  if (messages < 2) throw UsageError("generate_codebook: need M >= 2");
  if (length < 1) throw UsageError("generate_codebook: need N >= 1");
  if (!(power > 0.0)) throw UsageError("generate_codebook: need P1 > 0");
  if (messages > static_cast<std::uint64_t>(std::numeric_limits<Index>::max() / length)) {
    throw UsageError("generate_codebook: M*N overflows");
  }

  Engine rng = make_engine(seed, 0, Stream::codebook);
  const double amp = std::sqrt(power);
  Eigen::MatrixXd words(length, static_cast<Index>(messages));
  std::uint64_t bits = 0;
  int left = 0;
  for (Index m = 0; m < words.cols(); ++m) {
    for (Index n = 0; n < length; ++n) {
      if (left == 0) {
        bits = rng();
        left = 64;
      }
      words(n, m) = (bits & 1u) ? amp : -amp;
      bits >>= 1;
      --left;
    }
  }
  OuterCodebook cb(messages, length, power, seed, std::move(words));
  if (cb.may_collide()) {
    std::clog << "warning: M=" << messages << " exceeds 2^N for N=" << length
              << "; codewords cannot all be distinct\n";
  }
  return cb;
}

void save_codebook(const OuterCodebook& cb, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open codebook file for writing: " + path.string());
  os.write(kMagic.data(), kMagic.size());
  write_le<std::uint64_t>(os, cb.messages());
  write_le<std::uint64_t>(os, static_cast<std::uint64_t>(cb.length()));
  write_le<double>(os, cb.power());
  write_le<std::uint64_t>(os, cb.seed());

  const auto& w = cb.words();
  unsigned char byte = 0;
  int filled = 0;
  for (Index m = 0; m < w.cols(); ++m) {
    for (Index n = 0; n < w.rows(); ++n) {
      if (w(n, m) > 0.0) byte |= static_cast<unsigned char>(1u << filled);
      if (++filled == 8) {
        os.put(static_cast<char>(byte));
        byte = 0;
        filled = 0;
      }
    }
  }
  if (filled > 0) os.put(static_cast<char>(byte));
  if (!os) throw UsageError("failed writing codebook file: " + path.string());
}

OuterCodebook load_codebook(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open codebook file: " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw UsageError("not a codebook file: " + path.string());
  const auto messages = read_le<std::uint64_t>(is);
  const auto length = static_cast<Index>(read_le<std::uint64_t>(is));
  const auto power = read_le<double>(is);
  const auto seed = read_le<std::uint64_t>(is);
  if (messages < 2 || length < 1 || !(power > 0.0)) {
    throw UsageError("corrupt codebook header: " + path.string());
  }

  const double amp = std::sqrt(power);
  Eigen::MatrixXd words(length, static_cast<Index>(messages));
  int byte = 0;
  int used = 8;
  for (Index m = 0; m < words.cols(); ++m) {
    for (Index n = 0; n < length; ++n) {
      if (used == 8) {
        byte = is.get();
        if (byte == std::char_traits<char>::eof()) throw UsageError("codebook file truncated");
        used = 0;
      }
      words(n, m) = ((byte >> used) & 1) ? amp : -amp;
      ++used;
    }
  }
  return OuterCodebook(messages, length, power, seed, std::move(words));
}

Index interleaved_position(Index i, Index length, Index depth) {
  const Index rows = (length + depth - 1) / depth;
  const Index full_columns = (length % depth == 0) ? depth : length % depth;
  const Index row = i / depth;
  const Index col = i % depth;
  // Columns [0, full_columns) hold `rows` elements, the rest one fewer.
  const Index before = col <= full_columns ? col * rows
                                           : full_columns * rows + (col - full_columns) * (rows - 1);
  return before + row;
}

Index ml_decode(const OuterCodebook& cb, const Eigen::Ref<const Eigen::VectorXd>& uhat) {
  if (uhat.size() != cb.length()) {
    throw UsageError("ml_decode: statistic has " + std::to_string(uhat.size()) +
                     " symbols, codebook length is " + std::to_string(cb.length()));
  }
  const Eigen::VectorXd scores = cb.words().transpose() * uhat;
  Index best = 0;
  for (Index m = 1; m < scores.size(); ++m) {
    if (scores[m] > scores[best]) best = m;
  }
  return best;
}

}  // namespace udn
