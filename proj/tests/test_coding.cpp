#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "udn/coding.hpp"
#include "udn/rng.hpp"
#include "verify/oracles.hpp"

using namespace udn;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("codebook alphabet and energy") {
  const OuterCodebook two = generate_codebook(2, 1, 4.0, 3);
  CHECK(two.words().cwiseAbs().isApproxToConstant(2.0));

  const OuterCodebook cb = generate_codebook(64, 100, 0.3, 8);
  CHECK(cb.words().rows() == 100);
  CHECK(cb.words().cols() == 64);
  CHECK(cb.words().cwiseAbs().isApproxToConstant(std::sqrt(0.3), 0.0));
  for (Index m = 0; m < 64; ++m) {
    CHECK(cb.codeword(m).squaredNorm() == doctest::Approx(100 * 0.3).epsilon(1e-14));
  }
}

TEST_CASE("codebooks are reproducible from their seed") {
  CHECK(generate_codebook(16, 32, 1.0, 5).words() == generate_codebook(16, 32, 1.0, 5).words());
  CHECK(generate_codebook(16, 32, 1.0, 5).words() != generate_codebook(16, 32, 1.0, 6).words());
}

TEST_CASE("codebook symbols are unbiased") {
  const OuterCodebook cb = generate_codebook(1024, 256, 1.0, 77);
  const double mn = 1024.0 * 256.0;
  CHECK(std::abs(cb.words().mean()) <= 3.0 / std::sqrt(mn));
}

TEST_CASE("codebook arguments") {
  CHECK_THROWS_AS(generate_codebook(1, 8, 1.0, 1), UsageError);
  CHECK_THROWS_AS(generate_codebook(4, 0, 1.0, 1), UsageError);
  CHECK_THROWS_AS(generate_codebook(4, 8, 0.0, 1), UsageError);
  // More messages than distinct words is allowed, with a warning.
  const OuterCodebook crowded = generate_codebook(8, 2, 1.0, 1);
  CHECK(crowded.may_collide());
  CHECK_FALSE(generate_codebook(4, 2, 1.0, 1).may_collide());
}

TEST_CASE("codebook sidecar round trip") {
  const auto path = std::filesystem::temp_directory_path() / "udn_test_codebook.bin";
  const OuterCodebook cb = generate_codebook(37, 29, 0.8, 123);
  save_codebook(cb, path);
  const OuterCodebook back = load_codebook(path);
  CHECK(back.messages() == 37);
  CHECK(back.length() == 29);
  CHECK(back.power() == 0.8);
  CHECK(back.seed() == 123);
  CHECK(back.words() == cb.words());
  CHECK(std::filesystem::file_size(path) == 8 + 4 * 8 + (37 * 29 + 7) / 8);

  {
    std::ofstream bad(path, std::ios::binary);
    bad << "not a codebook";
  }
  CHECK_THROWS_AS(load_codebook(path), UsageError);
  std::filesystem::remove(path);
}

TEST_CASE("inner encoding repeats and attenuates") {
  CHECK(inner_encode(vec({1, -1}), {3, 1.0}) == vec({1, 1, 1, -1, -1, -1}));
  const Eigen::VectorXd x = inner_encode(vec({2}), {4, 0.5});
  CHECK(x == vec({1, 1, 1, 1}));
  CHECK(x.squaredNorm() == 4.0);
  const Eigen::VectorXd u = vec({0.3, -2, 5});
  CHECK(inner_encode(u, {1, 1.0}) == u);
  CHECK_THROWS_AS(inner_encode(u, {0, 1.0}), UsageError);
  CHECK_THROWS_AS(inner_encode(u, {2, 0.0}), UsageError);

  const OuterCodebook cb = generate_codebook(8, 50, 1.7, 2);
  for (Index m = 0; m < 8; ++m) {
    const Eigen::VectorXd enc = inner_encode(cb.codeword(m), {64, 1.0 / 8.0});
    CHECK(enc.squaredNorm() == doctest::Approx(50 * 1.7).epsilon(1e-13));
  }
}

TEST_CASE("block averaging") {
  const Eigen::VectorXd out = block_average(vec({1, 1, 1, 1}), 2, 2.0);
  CHECK(out[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(out[1] == doctest::Approx(std::sqrt(2.0)));

  const Eigen::VectorXd round = block_average(inner_encode(vec({1}), {4, 0.5}), 1, 4.0);
  CHECK(round[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(block_average(vec({1, 1, 1}), 2, 2.0), UsageError);
  CHECK_THROWS_AS(block_average(vec({1, 1}), 2, 0.5), UsageError);

  // Fractional widths: cumulative floors keep the blocks contiguous.
  CHECK(block_boundary(3, 2.5) == 7);
  const Eigen::VectorXd frac = block_average(Eigen::VectorXd::Ones(7), 3, 2.5);
  CHECK(frac[0] == doctest::Approx(2.0 / std::sqrt(2.5)));
  CHECK(frac[1] == doctest::Approx(3.0 / std::sqrt(2.5)));
  CHECK(frac[2] == doctest::Approx(2.0 / std::sqrt(2.5)));
}

TEST_CASE("normalised Gaussian block sums have unit variance") {
  Engine rng = make_engine(4, 0, Stream::test);
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(200'000 * 16);
  for (Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
  const Eigen::VectorXd out = block_average(y, 200'000, 16.0);
  const double var = (out.array() - out.mean()).square().mean();
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("interleaver") {
  const Eigen::VectorXd u = vec({1, 2, 3, 4, 5, 6});
  CHECK(interleave(u, 1) == u);
  CHECK(interleave(u, 2) == vec({1, 3, 5, 2, 4, 6}));

  Engine rng = make_engine(6, 0, Stream::test);
  std::normal_distribution<double> normal;
  for (Index len : {1, 2, 7, 16, 17, 256}) {
    for (Index depth : {1, 2, 3, 5}) {
      Eigen::VectorXd x(len);
      for (Index i = 0; i < len; ++i) x[i] = normal(rng);
      CHECK(deinterleave(interleave(x, depth), depth) == x);
      std::set<Index> seen;
      for (Index i = 0; i < len; ++i) seen.insert(interleaved_position(i, len, depth));
      CHECK(static_cast<Index>(seen.size()) == len);
    }
  }
  // Originally adjacent symbols end up at least depth apart.
  const Index len = 256, depth = 3;
  for (Index i = 0; i + 1 < len; ++i) {
    const Index a = interleaved_position(i, len, depth);
    const Index b = interleaved_position(i + 1, len, depth);
    CHECK(std::abs(a - b) >= depth);
  }
  CHECK_THROWS_AS(interleave(u, 0), UsageError);
}

TEST_CASE("correlation decoding") {
  const OuterCodebook cb = generate_codebook(16, 40, 1.0, 10);
  CHECK(ml_decode(cb, 3.5 * cb.codeword(3)) == 3);
  CHECK(ml_decode(cb, 0.01 * cb.codeword(11)) == 11);

  Eigen::MatrixXd pair(3, 2);
  pair.col(0) = vec({1, 1, -1});
  pair.col(1) = -pair.col(0);
  const OuterCodebook antipodal(2, 3, 1.0, 0, pair);
  CHECK(ml_decode(antipodal, -pair.col(0)) == 1);
  CHECK(ml_decode(antipodal, -pair.col(1)) == 0);
  // Tie goes to the lowest index.
  CHECK(ml_decode(antipodal, Eigen::VectorXd::Zero(3)) == 0);
}

TEST_CASE("correlation decoding agrees with exhaustive search on every trial") {
  const OuterCodebook cb = generate_codebook(64, 256, 1.0, 21);
  Engine rng = make_engine(21, 0, Stream::test);
  std::normal_distribution<double> noise(0.0, std::sqrt(2.0));  // SNR 0.5
  std::uniform_int_distribution<Index> pick(0, 63);
  const Index trials = 10'000;
  Index errors = 0, oracle_errors = 0, disagree = 0;
  Eigen::VectorXd y(256);
  for (Index t = 0; t < trials; ++t) {
    const Index m = pick(rng);
    for (Index n = 0; n < 256; ++n) y[n] = cb.words()(n, m) + noise(rng);
    const Index a = ml_decode(cb, y);
    const Index b = oracle::brute_force_decode(cb, y);
    errors += a != m;
    oracle_errors += b != m;
    disagree += a != b;
  }
  const double p = static_cast<double>(oracle_errors) / trials;
  const double se = std::sqrt(std::max(p * (1 - p), 1.0 / trials) / trials);
  CHECK(std::abs(static_cast<double>(errors) / trials - p) <= 3.0 * se);
  CHECK(disagree == 0);
}

TEST_CASE("decoding is invariant under positive scaling") {
  const OuterCodebook cb = generate_codebook(32, 24, 1.0, 4);
  Engine rng = make_engine(8, 0, Stream::test);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd y(24);
    for (Index i = 0; i < 24; ++i) y[i] = normal(rng);
    CHECK(ml_decode(cb, y) == ml_decode(cb, 17.0 * y));
  }
}
