#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "faota/channel.hpp"

namespace faota {

/// Distribution of a user's best-port gain. GaussianJakes has no closed form here
/// and is rejected by every analytic routine.
struct GainDistribution {
  std::size_t n_ports = 1;
  DependenceSpec dependence = Independent{};
};

/// Pr(max_n |h_n|^2 < x). Clayton: (N(1-e^-x)^-beta - N + 1)^(-1/beta),
/// Independent: (1-e^-x)^N, PerfectDependence: 1-e^-x. Zero at x = 0.
double channel_gain_cdf(const GainDistribution& dist, double x);

/// 1 - channel_gain_cdf, evaluated without cancellation for large x.
double channel_gain_sf(const GainDistribution& dist, double x);

/// Probability that a user's effective gain clears `gain_threshold`.
double qualify_probability(const GainDistribution& dist, double gain_threshold);

/// Pr(Binomial(n, q) >= s), log-domain terms accumulated smallest-first.
double binomial_upper_tail(std::size_t n, double q, std::size_t s);

/// Pr(Binomial(n, q) = s).
double binomial_pmf(std::size_t n, double q, std::size_t s);

/// CDF of the normalized aggregation MSE (MSE / sigma^2) when the bottleneck is the
/// S-th order statistic of Theta_k = 1/(p_max |h_k|^2) over K users.
double normalized_mse_cdf(const GainDistribution& dist, std::size_t users, std::size_t selected,
                          double p_max, double tau);

/// Pr(Gamma = S) where Gamma counts users with gain >= sigma2/(p_max tau).
double participation_pmf(const GainDistribution& dist, std::size_t users, std::size_t count,
                         double p_max, double sigma2, double tau);

/// participation_pmf for S = 0..K.
std::vector<double> participation_pmf_vector(const GainDistribution& dist, std::size_t users,
                                             double p_max, double sigma2, double tau);

/// Brute-force counterpart of normalized_mse_cdf. Each element of `effective_gains`
/// holds the K best-port gains of one trial; returns the fraction of trials whose
/// S-th smallest Theta_k = 1/(p_max g_k) is below tau.
double order_statistic_cdf_oracle(std::span<const std::vector<double>> effective_gains,
                                  std::size_t selected, double p_max, double tau);

/// Constants entering the optimality-gap bound.
struct ConvergenceConstants {
  double learning_rate = 0.01;
  double pl_constant = 1.0;        // mu
  double smoothness = 1.0;         // L
  double gradient_bound = 0.0;     // kappa
  double gradient_variance = 0.0;  // sigma_g^2
  std::vector<std::size_t> batch_sizes;  // |zeta_k|, one per user
  std::size_t users = 1;                 // K

  double contraction() const { return 1.0 - learning_rate * pl_constant; }

  /// Throws DomainError on invalid constants; returns human-readable warnings
  /// (currently only |psi| >= 1).
  std::vector<std::string> validate() const;
};

/// One round of the participation/MSE schedule. `members` lists the participating
/// users; it may be left empty when all batch sizes are equal.
struct ScheduleEntry {
  std::size_t participants = 0;
  double mse = 0.0;
  std::vector<std::size_t> members;
};

/// Per-round residual Delta_t.
double gap_residual(const ConvergenceConstants& c, const ScheduleEntry& round);

/// psi^T * initial_gap + sum_t psi^(T-t) Delta_t over the first T schedule entries.
double optimality_gap_bound(const ConvergenceConstants& c, std::span<const ScheduleEntry> schedule,
                            double initial_gap, std::size_t rounds);

/// optimality_gap_bound for T = 1..schedule.size().
std::vector<double> optimality_gap_curve(const ConvergenceConstants& c,
                                         std::span<const ScheduleEntry> schedule,
                                         double initial_gap);

}  // namespace faota
