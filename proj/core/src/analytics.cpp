#include "faota/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "faota/errors.hpp"

namespace faota {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double kahan_sum_ascending(std::vector<double>& terms) {
  std::ranges::sort(terms);
  double sum = 0.0;
  double comp = 0.0;
  for (double t : terms) {
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum;
}

double log_binomial_term(std::size_t n, double q, std::size_t i) {
  if (q <= 0.0) return i == 0 ? 0.0 : kNegInf;
  if (q >= 1.0) return i == n ? 0.0 : kNegInf;
  const auto nd = static_cast<double>(n);
  const auto id = static_cast<double>(i);
  const double lchoose = std::lgamma(nd + 1.0) - std::lgamma(id + 1.0) - std::lgamma(nd - id + 1.0);
  return lchoose + id * std::log(q) + (nd - id) * std::log1p(-q);
}

void check_probability(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("probability must lie in [0, 1]");
}

// log(1 - e^-x) for x > 0.
double log_marginal_cdf(double x) {
  return x > std::numbers::ln2 ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

// log t where t = N (1 - e^-x)^-beta - N + 1, given lp = log(1 - e^-x).
double clayton_log_t(std::size_t n, double beta, double lp) {
  const double la = -beta * lp;  // log of (1 - e^-x)^-beta, >= 0
  const auto nd = static_cast<double>(n);
  if (la < 30.0) return std::log1p(nd * std::expm1(la));
  return la + std::log(nd) + std::log1p(-(nd - 1.0) * std::exp(-la) / nd);
}

// log Pr(max gain < x) for x > 0.
double log_gain_cdf(const GainDistribution& dist, double x) {
  const double lp = log_marginal_cdf(x);
  const auto nd = static_cast<double>(dist.n_ports);
  if (std::holds_alternative<Independent>(dist.dependence)) return nd * lp;
  if (std::holds_alternative<PerfectDependence>(dist.dependence)) return lp;
  if (const auto* c = std::get_if<Clayton>(&dist.dependence)) {
    return -clayton_log_t(dist.n_ports, c->beta, lp) / c->beta;
  }
  throw DomainError("no closed-form gain distribution for Gaussian-Jakes dependence");
}

void check_distribution(const GainDistribution& dist) {
  if (dist.n_ports == 0) throw DomainError("gain distribution needs at least one port");
  validate(dist.dependence);
  if (std::holds_alternative<GaussianJakes>(dist.dependence)) {
    throw DomainError("no closed-form gain distribution for Gaussian-Jakes dependence");
  }
}

}  // namespace

double channel_gain_cdf(const GainDistribution& dist, double x) {
  check_distribution(dist);
  if (!(x >= 0.0)) throw DomainError("channel_gain_cdf requires x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::exp(log_gain_cdf(dist, x));
}

double channel_gain_sf(const GainDistribution& dist, double x) {
  check_distribution(dist);
  if (!(x >= 0.0)) throw DomainError("channel_gain_sf requires x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (std::holds_alternative<PerfectDependence>(dist.dependence)) return std::exp(-x);
  return -std::expm1(log_gain_cdf(dist, x));
}

double qualify_probability(const GainDistribution& dist, double gain_threshold) {
  if (!(gain_threshold > 0.0)) throw DomainError("gain threshold must be positive");
  return channel_gain_sf(dist, gain_threshold);
}

double binomial_pmf(std::size_t n, double q, std::size_t s) {
  check_probability(q);
  if (s > n) return 0.0;
  return std::exp(log_binomial_term(n, q, s));
}

double binomial_upper_tail(std::size_t n, double q, std::size_t s) {
  check_probability(q);
  if (s == 0) return 1.0;
  if (s > n) return 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  lower.reserve(s);
  upper.reserve(n - s + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = std::exp(log_binomial_term(n, q, i));
    (i < s ? lower : upper).push_back(t);
  }
  const double up = kahan_sum_ascending(upper);
  if (up <= 0.5) return std::clamp(up, 0.0, 1.0);
  return std::clamp(1.0 - kahan_sum_ascending(lower), 0.0, 1.0);
}

double normalized_mse_cdf(const GainDistribution& dist, std::size_t users, std::size_t selected,
                          double p_max, double tau) {
  if (selected < 1 || selected > users) {
    throw DomainError("normalized_mse_cdf requires 1 <= S <= K");
  }
  if (!(p_max > 0.0)) throw DomainError("p_max must be positive");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  const double q = channel_gain_sf(dist, 1.0 / (p_max * tau));
  return binomial_upper_tail(users, q, selected);
}

double participation_pmf(const GainDistribution& dist, std::size_t users, std::size_t count,
                         double p_max, double sigma2, double tau) {
  if (users < 1) throw DomainError("participation_pmf requires K >= 1");
  if (count > users) throw DomainError("participation_pmf requires 0 <= S <= K");
  if (!(p_max > 0.0) || !(sigma2 > 0.0) || !(tau > 0.0)) {
    throw DomainError("p_max, sigma2 and tau must be positive");
  }
  const double q = channel_gain_sf(dist, sigma2 / (p_max * tau));
  return binomial_pmf(users, q, count);
}

std::vector<double> participation_pmf_vector(const GainDistribution& dist, std::size_t users,
                                             double p_max, double sigma2, double tau) {
  std::vector<double> pmf(users + 1);
  for (std::size_t s = 0; s <= users; ++s) {
    pmf[s] = participation_pmf(dist, users, s, p_max, sigma2, tau);
  }
  return pmf;
}

double order_statistic_cdf_oracle(std::span<const std::vector<double>> effective_gains,
                                  std::size_t selected, double p_max, double tau) {
  if (effective_gains.empty()) throw DomainError("oracle needs at least one trial");
  if (selected < 1) throw DomainError("oracle requires S >= 1");
  std::size_t hits = 0;
  std::vector<double> theta;
  for (const auto& trial : effective_gains) {
    if (selected > trial.size()) throw DomainError("oracle requires S <= K");
    theta.resize(trial.size());
    std::ranges::transform(trial, theta.begin(), [p_max](double g) { return 1.0 / (p_max * g); });
    std::ranges::sort(theta);
    if (theta[selected - 1] < tau) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(effective_gains.size());
}

std::vector<std::string> ConvergenceConstants::validate() const {
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) {
    throw DomainError("learning rate must lie in (0, 1)");
  }
  if (!(pl_constant > 0.0)) throw DomainError("PL constant mu must be positive");
  if (!(smoothness > 0.0)) throw DomainError("smoothness L must be positive");
  if (!(gradient_bound >= 0.0)) throw DomainError("gradient bound kappa must be nonnegative");
  if (!(gradient_variance >= 0.0)) throw DomainError("gradient variance must be nonnegative");
  if (users < 1) throw DomainError("K must be at least 1");
  if (!batch_sizes.empty() && batch_sizes.size() != users) {
    throw DomainError("batch_sizes must have one entry per user");
  }
  if (std::ranges::any_of(batch_sizes, [](std::size_t b) { return b == 0; })) {
    throw DomainError("batch sizes must be positive");
  }
  std::vector<std::string> warnings;
  const double psi = contraction();
  if (std::fabs(psi) >= 1.0) {
    std::ostringstream os;
    os << "|psi| = |1 - lr*mu| = " << std::fabs(psi) << " >= 1: the bound does not contract";
    warnings.push_back(os.str());
  }
  return warnings;
}

double gap_residual(const ConvergenceConstants& c, const ScheduleEntry& round) {
  if (round.participants == 0) {
    throw DomainError("gap residual undefined for a round with no participants");
  }
  if (round.participants > c.users) throw DomainError("participants exceed K");
  if (!(round.mse >= 0.0)) throw DomainError("round MSE must be nonnegative");

  double variance_sum = 0.0;
  if (!round.members.empty()) {
    if (round.members.size() != round.participants) {
      throw DomainError("schedule members do not match the participant count");
    }
    for (auto k : round.members) {
      if (k >= c.batch_sizes.size()) throw DomainError("member index has no batch size");
      variance_sum += c.gradient_variance / static_cast<double>(c.batch_sizes[k]);
    }
  } else if (c.gradient_variance != 0.0) {
    if (c.batch_sizes.empty()) throw DomainError("nonzero gradient variance needs batch sizes");
    if (!std::ranges::all_of(c.batch_sizes,
                             [&](std::size_t b) { return b == c.batch_sizes.front(); })) {
      throw DomainError("unequal batch sizes require explicit schedule members");
    }
    variance_sum = static_cast<double>(round.participants) * c.gradient_variance /
                   static_cast<double>(c.batch_sizes.front());
  }

  const double s = static_cast<double>(round.participants);
  const double shortfall = 1.0 - s / static_cast<double>(c.users);
  const double lr = c.learning_rate;
  return 2.0 * lr * c.gradient_bound * shortfall * shortfall +
         lr * lr * c.smoothness / (s * s) * variance_sum + 0.5 * c.smoothness * round.mse;
}

double optimality_gap_bound(const ConvergenceConstants& c, std::span<const ScheduleEntry> schedule,
                            double initial_gap, std::size_t rounds) {
  if (rounds < 1) throw DomainError("optimality gap bound requires T >= 1");
  if (schedule.size() < rounds) throw DomainError("schedule shorter than T");
  if (!(initial_gap >= 0.0)) throw DomainError("initial gap must be nonnegative");
  const double psi = c.contraction();
  double bound = initial_gap;
  for (std::size_t t = 0; t < rounds; ++t) bound = psi * bound + gap_residual(c, schedule[t]);
  return bound;
}

std::vector<double> optimality_gap_curve(const ConvergenceConstants& c,
                                         std::span<const ScheduleEntry> schedule,
                                         double initial_gap) {
  if (!(initial_gap >= 0.0)) throw DomainError("initial gap must be nonnegative");
  const double psi = c.contraction();
  std::vector<double> curve;
  curve.reserve(schedule.size());
  double bound = initial_gap;
  for (const auto& round : schedule) {
    bound = psi * bound + gap_residual(c, round);
    curve.push_back(bound);
  }
  return curve;
}

}  // namespace faota
