#include <doctest.h>

#include <cmath>

#include "udn/analysis.hpp"
#include "verify/oracles.hpp"

using namespace udn;

TEST_CASE("trapezoid binary-input capacity") {
  CHECK(oracle::bpsk_capacity_trapezoid(0.5) == doctest::Approx(0.29048).epsilon(2e-4));
  CHECK(oracle::bpsk_capacity_trapezoid(100.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(oracle::bpsk_capacity_trapezoid(1e-4) == doctest::Approx(1e-4 / (2 * std::log(2.0))).epsilon(1e-3));
  CHECK(oracle::gaussian_capacity(1.0) == doctest::Approx(0.5));
}

TEST_CASE("exhaustive decoder picks the nearest word") {
  Eigen::MatrixXd w(2, 3);
  w << 1, -1, 1,
       1, 1, -1;
  const OuterCodebook cb(3, 2, 1.0, 0, w);
  CHECK(oracle::brute_force_decode(cb, Eigen::Vector2d(0.9, 1.2)) == 0);
  CHECK(oracle::brute_force_decode(cb, Eigen::Vector2d(-2, 0.1)) == 1);
  CHECK(oracle::brute_force_decode(cb, Eigen::Vector2d(0.5, -3)) == 2);
  CHECK(oracle::brute_force_decode(cb, Eigen::Vector2d(0, 0)) == 0);
}

TEST_CASE("expression tree reproduces the symmetric SNR floor") {
  const std::vector<double> p2{0.3, 0.3, 0.3}, mu{1.2, 1.2, 1.2};
  CHECK(oracle::snr_lb_unequal_tree(0.7, p2, mu, mu, 0.4, 2.0) ==
        doctest::Approx(snr_lb(0.7, 0.3, 3, 0.4, 2.0, 1.2)).epsilon(1e-13));
}

TEST_CASE("three-point moments and min-cut by enumeration") {
  const auto m = oracle::three_point_moments(1.0, 0.1);
  CHECK(m.mean == doctest::Approx(1.0));
  CHECK(m.variance == doctest::Approx(0.1));
  CHECK(oracle::min_cut(4, 1, 0.1) == doctest::Approx(0.4));
}

TEST_CASE("reference BPSK link") {
  CHECK(oracle::bpsk_awgn_link(100.0, 16, 32, 200, 1).errors == 0);
  const auto noisy = oracle::bpsk_awgn_link(0.01, 256, 8, 200, 1);
  CHECK(noisy.rate() > 0.9);
  // Same seed, same answer.
  CHECK(oracle::bpsk_awgn_link(0.4, 64, 24, 300, 5).errors ==
        oracle::bpsk_awgn_link(0.4, 64, 24, 300, 5).errors);
}
