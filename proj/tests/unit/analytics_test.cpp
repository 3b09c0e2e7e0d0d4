#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "faota/analytics.hpp"
#include "faota/channel.hpp"
#include "faota/curve.hpp"
#include "faota/errors.hpp"
#include "faota/rng.hpp"

namespace faota {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Binomial tail by direct summation of n choose i, used as an oracle.
double naive_tail(std::size_t n, double q, std::size_t s) {
  double total = 0.0;
  for (std::size_t i = s; i <= n; ++i) {
    double c = 1.0;
    for (std::size_t j = 0; j < i; ++j) c = c * static_cast<double>(n - j) / static_cast<double>(j + 1);
    total += c * std::pow(q, static_cast<double>(i)) * std::pow(1.0 - q, static_cast<double>(n - i));
  }
  return total;
}

std::vector<GainDistribution> closed_form_dists(std::size_t n) {
  return {{n, Independent{}}, {n, Clayton{0.5}}, {n, Clayton{1.0}},
          {n, Clayton{2.0}},  {n, Clayton{7.0}}, {n, PerfectDependence{}}};
}

TEST(GainCdf, HandValues) {
  EXPECT_NEAR(channel_gain_cdf({2, Clayton{1.0}}, std::numbers::ln2), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(channel_gain_cdf({10, Independent{}}, std::numbers::ln2), std::pow(0.5, 10), 1e-16);
  EXPECT_NEAR(channel_gain_cdf({3, PerfectDependence{}}, std::numbers::ln2), 0.5, 1e-15);
  for (const auto& d : closed_form_dists(4)) EXPECT_EQ(channel_gain_cdf(d, 0.0), 0.0);
}

TEST(GainCdf, MonotoneAndBounded) {
  const auto grid = log_grid(1e-6, 60.0, 400);
  for (std::size_t n : {1u, 2u, 10u, 50u}) {
    for (const auto& d : closed_form_dists(n)) {
      double prev = 0.0;
      for (double x : grid) {
        const double f = channel_gain_cdf(d, x);
        ASSERT_GE(f, prev);
        ASSERT_LE(f, 1.0);
        EXPECT_NEAR(f + channel_gain_sf(d, x), 1.0, 1e-12);
        prev = f;
      }
      EXPECT_NEAR(channel_gain_cdf(d, 60.0), 1.0, 1e-12);
      EXPECT_EQ(channel_gain_cdf(d, kInf), 1.0);
    }
  }
}

TEST(GainCdf, ClaytonLimits) {
  for (double x : log_grid(1e-3, 30.0, 100)) {
    EXPECT_NEAR(channel_gain_cdf({6, Clayton{1e-6}}, x), channel_gain_cdf({6, Independent{}}, x),
                1e-6);
    EXPECT_NEAR(channel_gain_cdf({6, Clayton{1e6}}, x),
                channel_gain_cdf({6, PerfectDependence{}}, x), 1e-4);
  }
}

TEST(GainCdf, SurvivalIsAccurateInTheTail) {
  // Independent: 1 - (1 - e^-x)^N ~ N e^-x for large x.
  const double x = 40.0;
  EXPECT_NEAR(channel_gain_sf({5, Independent{}}, x) / (5.0 * std::exp(-x)), 1.0, 1e-9);
  EXPECT_NEAR(channel_gain_sf({1, PerfectDependence{}}, x) / std::exp(-x), 1.0, 1e-14);
  EXPECT_GT(channel_gain_sf({5, Clayton{2.0}}, x), 0.0);
}

TEST(GainCdf, Errors) {
  EXPECT_THROW(channel_gain_cdf({2, Independent{}}, -1.0), DomainError);
  EXPECT_THROW(channel_gain_cdf({0, Independent{}}, 1.0), DomainError);
  EXPECT_THROW(channel_gain_cdf({2, Clayton{-1.0}}, 1.0), DomainError);
  EXPECT_THROW(channel_gain_cdf({2, GaussianJakes{0.5, 1.0}}, 1.0), DomainError);
  EXPECT_THROW(qualify_probability({2, Independent{}}, 0.0), DomainError);
}

TEST(QualifyProbability, Limits) {
  const GainDistribution d{10, Clayton{2.0}};
  EXPECT_NEAR(qualify_probability(d, 1e-12), 1.0, 1e-9);
  EXPECT_NEAR(qualify_probability(d, 1e3), 0.0, 1e-12);
  EXPECT_NEAR(qualify_probability({1, PerfectDependence{}}, std::numbers::ln2), 0.5, 1e-15);
}

TEST(Binomial, TailMatchesNaiveSum) {
  for (std::size_t n : {1u, 4u, 20u, 60u}) {
    for (double q : {0.0, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0}) {
      for (std::size_t s = 0; s <= n + 1; ++s) {
        const double expected = s > n ? 0.0 : naive_tail(n, q, s);
        EXPECT_NEAR(binomial_upper_tail(n, q, s), expected, 1e-12)
            << "n=" << n << " q=" << q << " s=" << s;
      }
    }
  }
}

TEST(Binomial, LargeKStaysNormalized) {
  const std::size_t n = 10000;
  double total = 0.0;
  for (std::size_t s = 0; s <= n; ++s) total += binomial_pmf(n, 0.37, s);
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_NEAR(binomial_upper_tail(n, 0.37, 3700), 0.5, 0.01);
  EXPECT_GT(binomial_upper_tail(n, 0.37, 4200), 0.0);
}

TEST(NormalizedMseCdf, EnumeratedExample) {
  const double v = normalized_mse_cdf({2, Independent{}}, 4, 2, 1.0, 1.0 / std::numbers::ln2);
  EXPECT_NEAR(v, 243.0 / 256.0, 1e-14);
}

TEST(NormalizedMseCdf, LimitsAndMonotonicity) {
  const double p_max = 0.01;
  const auto taus = log_grid(0.5, 5000.0, 60);
  for (const auto& d : closed_form_dists(10)) {
    EXPECT_NEAR(normalized_mse_cdf(d, 20, 15, p_max, 1e12), 1.0, 1e-9);
    EXPECT_NEAR(normalized_mse_cdf(d, 20, 15, p_max, 1e-6), 0.0, 1e-12);
    double prev = 0.0;
    for (double tau : taus) {
      const double f = normalized_mse_cdf(d, 20, 15, p_max, tau);
      EXPECT_GE(f, prev);
      prev = f;
      for (std::size_t s = 2; s <= 20; ++s) {
        EXPECT_LE(normalized_mse_cdf(d, 20, s, p_max, tau),
                  normalized_mse_cdf(d, 20, s - 1, p_max, tau));
      }
    }
  }
}

TEST(NormalizedMseCdf, MorePortsNeverHurt) {
  for (double tau : log_grid(1.0, 2000.0, 25)) {
    for (const DependenceSpec& dep :
         {DependenceSpec{Independent{}}, DependenceSpec{Clayton{1.0}}, DependenceSpec{Clayton{2.0}}}) {
      for (std::size_t n = 2; n <= 20; ++n) {
        EXPECT_GE(normalized_mse_cdf({n, dep}, 20, 15, 0.01, tau) + 1e-15,
                  normalized_mse_cdf({n - 1, dep}, 20, 15, 0.01, tau));
      }
    }
  }
}

TEST(NormalizedMseCdf, Errors) {
  EXPECT_THROW(normalized_mse_cdf({2, Independent{}}, 4, 5, 1.0, 1.0), DomainError);
  EXPECT_THROW(normalized_mse_cdf({2, Independent{}}, 4, 0, 1.0, 1.0), DomainError);
  EXPECT_THROW(normalized_mse_cdf({2, Independent{}}, 4, 2, 0.0, 1.0), DomainError);
}

TEST(NormalizedMseCdf, AgreesWithOrderStatisticOracle) {
  const std::size_t trials = 20000;
  struct Case {
    std::size_t users, selected, ports;
    DependenceSpec dep;
    double tau;
  };
  const std::vector<Case> cases = {{4, 2, 2, Independent{}, 1.0 / std::numbers::ln2},
                                   {6, 3, 4, Clayton{1.0}, 1.5},
                                   {10, 7, 5, Clayton{2.0}, 2.0},
                                   {5, 5, 3, PerfectDependence{}, 4.0}};
  std::uint64_t stream = 0;
  for (const auto& c : cases) {
    RngStream rng(2024, stream++);
    std::vector<std::vector<double>> gains;
    gains.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      gains.push_back(select_ports(sample_gains(c.dep, c.users, c.ports, rng)).gain);
    }
    const double f = normalized_mse_cdf({c.ports, c.dep}, c.users, c.selected, 1.0, c.tau);
    const double emp = order_statistic_cdf_oracle(gains, c.selected, 1.0, c.tau);
    // Four simultaneous checks: a 4-sigma band keeps the family-wise false alarm
    // rate near that of a single 3-sigma check.
    const double band = std::max(4.0 * std::sqrt(f * (1.0 - f) / trials), 1e-3);
    EXPECT_NEAR(emp, f, band) << dependence_label(c.dep);
  }
}

TEST(OrderStatisticOracle, TrivialCases) {
  const std::vector<std::vector<double>> huge = {{1e9, 1e9}, {1e10, 1e9}};
  EXPECT_EQ(order_statistic_cdf_oracle(huge, 2, 1.0, 1.0), 1.0);
  const std::vector<std::vector<double>> single = {{2.0}, {0.5}, {4.0}, {0.1}};
  // Theta = 1/g: 0.5, 2, 0.25, 10; below tau=1 for two of four.
  EXPECT_EQ(order_statistic_cdf_oracle(single, 1, 1.0, 1.0), 0.5);
  EXPECT_THROW(order_statistic_cdf_oracle(single, 2, 1.0, 1.0), DomainError);
}

TEST(ParticipationPmf, NormalizationAndMean) {
  for (const auto& d : closed_form_dists(10)) {
    for (double tau : {0.01, 0.05, 0.2, 1.0}) {
      const auto pmf = participation_pmf_vector(d, 20, 0.01, 1e-3, tau);
      double total = 0.0;
      double mean = 0.0;
      for (std::size_t s = 0; s < pmf.size(); ++s) {
        ASSERT_GE(pmf[s], 0.0);
        total += pmf[s];
        mean += static_cast<double>(s) * pmf[s];
      }
      const double q = qualify_probability(d, 1e-3 / (0.01 * tau));
      EXPECT_NEAR(total, 1.0, 1e-12);
      EXPECT_NEAR(mean, 20.0 * q, 1e-10);
    }
  }
}

TEST(ParticipationPmf, HandValuesAndLimits) {
  EXPECT_NEAR(participation_pmf({1, PerfectDependence{}}, 2, 1, 1.0, std::numbers::ln2, 1.0), 0.5,
              1e-15);
  EXPECT_NEAR(participation_pmf({5, Clayton{2.0}}, 20, 20, 0.01, 1e-3, 1e12), 1.0, 1e-9);
  EXPECT_THROW(participation_pmf({5, Independent{}}, 3, 4, 1.0, 1.0, 1.0), DomainError);
}

ConvergenceConstants demo_constants() {
  ConvergenceConstants c;
  c.learning_rate = 0.1;
  c.pl_constant = 2.0;
  c.smoothness = 3.0;
  c.gradient_bound = 1.5;
  c.gradient_variance = 0.4;
  c.batch_sizes = {8, 16, 32, 8};
  c.users = 4;
  return c;
}

std::vector<ScheduleEntry> demo_schedule() {
  return {{2, 0.3, {0, 1}}, {4, 0.1, {0, 1, 2, 3}}, {1, 0.8, {3}}, {3, 0.2, {1, 2, 3}}};
}

// Independent evaluation of the closed sum psi^T F + sum psi^(T-t) Delta_t.
double closed_sum(const ConvergenceConstants& c, const std::vector<ScheduleEntry>& s, double f1) {
  const double psi = 1.0 - c.learning_rate * c.pl_constant;
  const std::size_t t_max = s.size();
  double total = std::pow(psi, static_cast<double>(t_max)) * f1;
  for (std::size_t t = 0; t < t_max; ++t) {
    const double n = static_cast<double>(s[t].participants);
    double var = 0.0;
    for (auto k : s[t].members) var += c.gradient_variance / static_cast<double>(c.batch_sizes[k]);
    const double short_ = 1.0 - n / static_cast<double>(c.users);
    const double delta = 2.0 * c.learning_rate * c.gradient_bound * short_ * short_ +
                         c.learning_rate * c.learning_rate * c.smoothness / (n * n) * var +
                         c.smoothness / 2.0 * s[t].mse;
    total += std::pow(psi, static_cast<double>(t_max - t - 1)) * delta;
  }
  return total;
}

TEST(GapBound, MatchesClosedSum) {
  const auto c = demo_constants();
  const auto s = demo_schedule();
  EXPECT_NEAR(optimality_gap_bound(c, s, 5.0, s.size()), closed_sum(c, s, 5.0), 1e-12);
  const auto curve = optimality_gap_curve(c, s, 5.0);
  ASSERT_EQ(curve.size(), s.size());
  EXPECT_DOUBLE_EQ(curve.back(), optimality_gap_bound(c, s, 5.0, s.size()));
}

TEST(GapBound, FullParticipationNoNoiseDecaysGeometrically) {
  auto c = demo_constants();
  c.gradient_variance = 0.0;
  std::vector<ScheduleEntry> s(50, ScheduleEntry{4, 0.0, {}});
  const double psi = c.contraction();
  const auto curve = optimality_gap_curve(c, s, 2.0);
  for (std::size_t t = 0; t < curve.size(); ++t) {
    EXPECT_NEAR(curve[t], std::pow(psi, static_cast<double>(t + 1)) * 2.0, 1e-12);
  }
}

TEST(GapBound, SingleRoundWithZeroPsiIsResidual) {
  auto c = demo_constants();
  c.learning_rate = 0.5;  // psi = 0
  const std::vector<ScheduleEntry> s = {{2, 0.3, {0, 1}}};
  EXPECT_DOUBLE_EQ(optimality_gap_bound(c, s, 100.0, 1), gap_residual(c, s[0]));
}

TEST(GapBound, LinearInMse) {
  const auto c = demo_constants();
  auto s = demo_schedule();
  const double base = optimality_gap_bound(c, s, 1.0, s.size());
  const double psi = c.contraction();
  double expected = 0.0;
  for (std::size_t t = 0; t < s.size(); ++t) {
    expected += c.smoothness / 2.0 * std::pow(psi, static_cast<double>(s.size() - t - 1)) * s[t].mse;
    s[t].mse *= 2.0;
  }
  EXPECT_NEAR(optimality_gap_bound(c, s, 1.0, s.size()) - base, expected, 1e-12);
}

TEST(GapBound, MonotoneInMseAndParticipants) {
  auto c = demo_constants();
  c.batch_sizes = {16, 16, 16, 16};
  std::vector<ScheduleEntry> s = {{1, 0.2, {}}, {2, 0.4, {}}, {3, 0.1, {}}};
  const double base = optimality_gap_bound(c, s, 1.0, 3);
  for (std::size_t t = 0; t < s.size(); ++t) {
    auto up = s;
    up[t].mse += 1e-3;
    EXPECT_GT(optimality_gap_bound(c, up, 1.0, 3), base);
    auto more = s;
    more[t].participants += 1;
    EXPECT_LE(optimality_gap_bound(c, more, 1.0, 3), base);
  }
}

TEST(GapBound, GeometricLimit) {
  auto c = demo_constants();
  c.gradient_variance = 0.0;
  c.gradient_bound = 0.0;
  std::vector<ScheduleEntry> s(1000, ScheduleEntry{4, 0.2, {}});
  const double delta = 0.5 * c.smoothness * 0.2;
  const double limit = delta / (1.0 - c.contraction());
  EXPECT_NEAR(optimality_gap_bound(c, s, 10.0, 1000) / limit, 1.0, 0.01);
}

TEST(GapBound, Errors) {
  const auto c = demo_constants();
  const std::vector<ScheduleEntry> empty_round = {{0, 0.1, {}}};
  EXPECT_THROW(optimality_gap_bound(c, empty_round, 1.0, 1), DomainError);
  EXPECT_THROW(optimality_gap_bound(c, demo_schedule(), 1.0, 0), DomainError);
  EXPECT_THROW(optimality_gap_bound(c, demo_schedule(), 1.0, 9), DomainError);
  auto unequal = c;
  const std::vector<ScheduleEntry> no_members = {{2, 0.1, {}}};
  EXPECT_THROW(gap_residual(unequal, no_members[0]), DomainError);
  auto diverging = c;
  diverging.learning_rate = 0.9;
  diverging.pl_constant = 3.0;
  EXPECT_EQ(diverging.validate().size(), 1u);
  EXPECT_TRUE(c.validate().empty());
}

TEST(AnalyticCurve, CsvAndJsonRoundTrip) {
  AnalyticCurve curve;
  curve.abscissae = {0.1, 1.0, 10.0};
  curve.values = {0.0, 0.25, 1.0};
  curve.meta = {{"K", 20}, {"beta", 2.0}};
  curve.validate_cdf();
  std::ostringstream os;
  curve.write_csv(os);
  EXPECT_EQ(os.str(), "abscissa,value\n0.1,0\n1,0.25\n10,1\n");
  const auto back = AnalyticCurve::from_json(curve.to_json());
  EXPECT_EQ(back.abscissae, curve.abscissae);
  EXPECT_EQ(back.values, curve.values);
  EXPECT_EQ(back.meta, curve.meta);

  AnalyticCurve bad = curve;
  bad.values = {0.3, 0.2, 1.0};
  EXPECT_THROW(bad.validate_cdf(), ValidationError);
  bad.values = {0.1};
  EXPECT_THROW(bad.validate(), DimensionError);
}

TEST(Curve, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(kInf), "inf");
  const auto g = log_grid(0.05, 50.0, 7);
  EXPECT_EQ(g.front(), 0.05);
  EXPECT_EQ(g.back(), 50.0);
}

}  // namespace
}  // namespace faota
