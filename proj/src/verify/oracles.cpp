#include "verify/oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <random>

namespace udn::oracle {

Index brute_force_decode(const OuterCodebook& cb, const Eigen::VectorXd& received) {
  const Eigen::MatrixXd& w = cb.words();
  Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index m = 0; m < w.cols(); ++m) {
    double d = 0.0;
    for (Index n = 0; n < w.rows(); ++n) {
      const double e = received[n] - w(n, m);
      d += e * e;
    }
    if (d < best_dist) {
      best_dist = d;
      best = m;
    }
  }
  return best;
}

double bpsk_capacity_trapezoid(double snr) {
  // I = 1 - E[log2(1 + exp(-2 a Y))], Y ~ N(a, 1), a = sqrt(snr).
  const double a = std::sqrt(snr);
  const double lo = a - 20.0, hi = a + 20.0;
  const int steps = 400000;
  const double dx = (hi - lo) / steps;
  const double norm = 1.0 / std::sqrt(2.0 * M_PI);
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double y = lo + i * dx;
    const double pdf = norm * std::exp(-0.5 * (y - a) * (y - a));
    const double t = -2.0 * a * y;
    const double softplus = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    const double f = pdf * softplus / std::log(2.0);
    sum += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  return 1.0 - sum * dx;
}

double gaussian_capacity(double snr) { return 0.5 * std::log1p(snr) / std::log(2.0); }

namespace {

// A tiny arithmetic expression tree.
struct Node {
  virtual ~Node() = default;
  virtual double eval() const = 0;
};
using Ptr = std::shared_ptr<Node>;

struct Leaf : Node {
  double v;
  explicit Leaf(double x) : v(x) {}
  double eval() const override { return v; }
};

struct Binary : Node {
  Ptr l, r;
  std::function<double(double, double)> op;
  Binary(Ptr a, Ptr b, std::function<double(double, double)> f) : l(std::move(a)), r(std::move(b)), op(std::move(f)) {}
  double eval() const override { return op(l->eval(), r->eval()); }
};

struct Unary : Node {
  Ptr c;
  std::function<double(double)> op;
  Unary(Ptr a, std::function<double(double)> f) : c(std::move(a)), op(std::move(f)) {}
  double eval() const override { return op(c->eval()); }
};

Ptr lit(double v) { return std::make_shared<Leaf>(v); }
Ptr add(Ptr a, Ptr b) { return std::make_shared<Binary>(a, b, std::plus<>()); }
Ptr mul(Ptr a, Ptr b) { return std::make_shared<Binary>(a, b, std::multiplies<>()); }
Ptr div(Ptr a, Ptr b) { return std::make_shared<Binary>(a, b, std::divides<>()); }
Ptr root(Ptr a) { return std::make_shared<Unary>(a, [](double x) { return std::sqrt(x); }); }

}  // namespace

double snr_lb_unequal_tree(double p1, std::span<const double> p2, std::span<const double> mu_first,
                           std::span<const double> mu_second, double g, double h) {
  Ptr amplitude = lit(0.0);
  Ptr noise = lit(1.0);
  for (std::size_t k = 0; k < p2.size(); ++k) {
    Ptr alpha_sq = div(lit(p2[k]), add(lit(1.0), mul(mul(lit(mu_first[k]), lit(g)), lit(p1))));
    Ptr term = mul(root(alpha_sq), root(mul(mul(lit(mu_first[k]), lit(mu_second[k])), mul(lit(g), lit(h)))));
    amplitude = add(amplitude, term);
    noise = add(noise, mul(mul(lit(h), lit(mu_second[k])), alpha_sq));
  }
  return div(mul(mul(amplitude, amplitude), lit(p1)), noise)->eval();
}

double min_cut(int relays, double g, double h) {
  const double k = relays;
  double cuts[3] = {k * g, std::sqrt(k * g * h), k * h};
  double m = cuts[0];
  for (double c : cuts) m = c < m ? c : m;
  return m;
}

Moments three_point_moments(double mu, double sigma2) {
  const double p2 = (sigma2 + mu * mu - mu) / 2.0;
  const double p1 = mu - 2.0 * p2;
  Moments m;
  m.mean = p1 + 2.0 * p2;
  m.variance = p1 + 4.0 * p2 - m.mean * m.mean;
  return m;
}

ReferenceLink bpsk_awgn_link(double snr, std::uint64_t messages, Index length, std::int64_t trials,
                             std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed * 2654435761u + 12345u));
  std::bernoulli_distribution coin(0.5);
  const auto m_count = static_cast<Index>(messages);
  Eigen::MatrixXd words(length, m_count);
  for (Index m = 0; m < m_count; ++m)
    for (Index n = 0; n < length; ++n) words(n, m) = coin(rng) ? 1.0 : -1.0;
  OuterCodebook cb(messages, length, 1.0, seed, words);

  std::normal_distribution<double> noise(0.0, 1.0 / std::sqrt(snr));
  std::uniform_int_distribution<Index> pick(0, m_count - 1);
  ReferenceLink link;
  link.trials = trials;
  Eigen::VectorXd y(length);
  for (std::int64_t t = 0; t < trials; ++t) {
    const Index m = pick(rng);
    for (Index n = 0; n < length; ++n) y[n] = words(n, m) + noise(rng);
    if (brute_force_decode(cb, y) != m) ++link.errors;
  }
  return link;
}

}  // namespace udn::oracle
