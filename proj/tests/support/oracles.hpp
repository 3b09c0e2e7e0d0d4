#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "faota/mlp.hpp"
#include "faota/rng.hpp"

namespace faota::oracle {

/// CDF of the best of n Exp(1) ports, written straight from the copula form.
/// beta = 0 means independent ports, beta < 0 the fixed-position antenna.
inline double max_gain_cdf(std::size_t n, double beta, double x) {
  if (x <= 0.0) return 0.0;
  const double u = 1.0 - std::exp(-x);
  if (beta < 0.0) return u;
  if (beta == 0.0) return std::pow(u, static_cast<double>(n));
  const double nn = static_cast<double>(n);
  return std::pow(nn * std::pow(u, -beta) - nn + 1.0, -1.0 / beta);
}

/// Binomial(n, q) probability mass at s via log-gamma.
inline double binomial_pmf(std::size_t n, double q, std::size_t s) {
  if (q <= 0.0) return s == 0 ? 1.0 : 0.0;
  if (q >= 1.0) return s == n ? 1.0 : 0.0;
  const double nn = static_cast<double>(n);
  const double ss = static_cast<double>(s);
  return std::exp(std::lgamma(nn + 1.0) - std::lgamma(ss + 1.0) - std::lgamma(nn - ss + 1.0) +
                  ss * std::log(q) + (nn - ss) * std::log1p(-q));
}

/// Pr(Binomial(n, q) >= s) by direct summation.
inline double binomial_upper_tail(std::size_t n, double q, std::size_t s) {
  double sum = 0.0;
  for (std::size_t i = s; i <= n; ++i) sum += binomial_pmf(n, q, i);
  return std::min(sum, 1.0);
}

/// Kendall tau-a by the O(n^2) pair count.
inline double kendall_tau_bruteforce(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  long long score = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx * dy > 0) ++score;
      if (dx * dy < 0) --score;
    }
  }
  return static_cast<double>(score) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
};

/// Compares backprop against central differences at `probes` random coordinates.
/// Relative error is |a - b| / max(|a|, |b|, floor).
inline GradientCheck check_gradient(const Mlp& model, const Eigen::VectorXd& params,
                                    const RowMatrix& x, const std::vector<int>& y,
                                    std::size_t probes, RngStream& rng, double h = 1e-5,
                                    double floor = 1e-4) {
  Eigen::VectorXd grad;
  model.loss_and_gradient(params, x, y, grad);
  GradientCheck out;
  std::uniform_int_distribution<Eigen::Index> pick(0, params.size() - 1);
  for (std::size_t p = 0; p < probes; ++p) {
    const Eigen::Index i = probes >= static_cast<std::size_t>(params.size())
                               ? static_cast<Eigen::Index>(p % static_cast<std::size_t>(params.size()))
                               : pick(rng.engine());
    Eigen::VectorXd plus = params;
    Eigen::VectorXd minus = params;
    plus(i) += h;
    minus(i) -= h;
    const double fd = (model.loss(plus, x, y) - model.loss(minus, x, y)) / (2.0 * h);
    const double denom = std::max({std::fabs(fd), std::fabs(grad(i)), floor});
    out.max_relative_error = std::max(out.max_relative_error, std::fabs(fd - grad(i)) / denom);
    ++out.probes;
  }
  return out;
}

}  // namespace faota::oracle
