#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faota/analytics.hpp"
#include "faota/channel.hpp"
#include "faota/curve.hpp"

namespace faota {

/// Parameters of a Monte Carlo experiment. Trial t of every variant uses the
/// sub-stream derive_seed(seed, t), so variants share random numbers trial by trial
/// and results do not depend on `threads`.
struct McPlan {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;  // 0 = hardware concurrency

  std::size_t users = 20;     // K
  std::size_t ports = 10;     // N
  std::size_t selected = 15;  // |S| for the MSE CDF experiment
  double p_max = 0.01;        // watts
  double sigma2 = 1e-3;       // watts
  double tau = 0.05;          // participation MSE target

  std::vector<double> tau_grid;         // MSE CDF abscissae (normalized MSE)
  std::vector<std::size_t> port_grid;   // N values for the port sweep
  std::vector<double> gain_grid;        // max-gain CDF abscissae for copula diagnostics
  double jakes_aperture = 0.5;          // W for the Gaussian-Jakes cross-check
  std::vector<DependenceSpec> variants;

  /// Throws DomainError on empty/unsorted grids or invalid parameters.
  void validate() const;
  /// The four dependence variants of the evaluation: Independent, Clayton(1),
  /// Clayton(2) and the fixed-position antenna.
  static std::vector<DependenceSpec> standard_variants();
};

/// Log-spaced normalized-MSE grid covering best-port gains 1/(p_max tau) in [0.02, 20].
std::vector<double> default_tau_grid(double p_max, std::size_t points = 30);

/// Log-spaced grid between the lo_p and hi_p quantiles of the best-port gain.
std::vector<double> quantile_gain_grid(const GainDistribution& dist, double lo_p, double hi_p,
                                       std::size_t points);

struct ComparisonPoint {
  double x = 0.0;
  double empirical = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

/// Empirical vs closed form on a grid. A point passes iff
/// |empirical - analytic| <= max(3 * stderr, 1e-3), stderr = sqrt(p(1-p)/M).
/// Points with a NaN analytic value (no closed form) are report-only and pass.
struct ComparisonReport {
  std::string name;
  std::size_t trials = 0;
  std::vector<ComparisonPoint> points;

  static constexpr double kSigmas = 3.0;
  static constexpr double kFloor = 1e-3;

  void add(double x, double empirical, double analytic);
  bool passed() const;
  double sup_gap() const;
  /// First failing point, if any.
  std::optional<ComparisonPoint> first_failure() const;

  /// Columns: x,analytic,empirical,stderr,pass
  void write_csv(std::ostream& os) const;
  nlohmann::ordered_json to_json() const;
};

struct VariantComparison {
  std::string variant;
  ComparisonReport report;
  AnalyticCurve analytic;
};

/// Empirical CDF of the |S|-th order statistic of Theta_k = 1/(p_max |h_k|^2) vs the
/// binomial-tail closed form, for each plan variant over plan.tau_grid.
std::vector<VariantComparison> run_mse_cdf_experiment(const McPlan& plan);

struct ParticipationComparison {
  std::string variant;
  ComparisonReport pmf;     // x = number of participants 0..K
  double qualify_probability = 0.0;
  double mean_empirical = 0.0;
  double mean_analytic = 0.0;  // K q
  double mean_stderr = 0.0;
  bool mean_pass = false;
  std::size_t mode_empirical = 0;
  AnalyticCurve analytic;
};

/// Histogram of the participant count at threshold sigma2/(p_max tau) vs the binomial PMF.
std::vector<ParticipationComparison> run_participation_experiment(const McPlan& plan);

/// Pr(Gamma = K) against N over plan.port_grid (analytic q^K plus empirical).
std::vector<VariantComparison> run_port_sweep(const McPlan& plan);

struct CopulaDiagnostic {
  std::string variant;
  double ks_max = 0.0;       // largest per-port KS statistic vs the marginal
  double ks_critical = 0.0;  // 1% family-wise critical value (alpha 0.01 / N)
  bool ks_pass = false;
  std::optional<double> kendall_tau;           // ports 1 and 2, when N >= 2
  std::optional<double> kendall_tau_expected;  // beta/(beta+2), 0 or 1
  bool tau_pass = true;
  std::optional<ComparisonReport> max_cdf;     // closed-form variants only
};

struct CopulaDiagnostics {
  std::vector<CopulaDiagnostic> variants;
  /// Report-only: empirical Gaussian-Jakes max-CDF at (N, W) next to the Clayton(beta)
  /// and Independent closed forms. No pass/fail.
  nlohmann::ordered_json jakes_cross_check;
  bool passed() const;
};

/// Marginal KS, Kendall tau and max-CDF checks per variant; `plan.trials` rows each.
CopulaDiagnostics run_copula_diagnostics(const McPlan& plan);

/// Kendall tau implied by a dependence spec: beta/(beta+2), 0 or 1. Empty for Jakes.
std::optional<double> expected_kendall_tau(const DependenceSpec& dep);

}  // namespace faota
