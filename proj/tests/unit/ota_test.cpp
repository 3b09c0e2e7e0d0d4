#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "faota/channel.hpp"
#include "faota/errors.hpp"
#include "faota/ota.hpp"
#include "faota/rng.hpp"

namespace faota {
namespace {

EffectiveGains gains(std::vector<double> g) {
  EffectiveGains e;
  e.port.assign(g.size(), 0);
  e.gain = std::move(g);
  return e;
}

OtaConfig config(double p_max, double sigma2, double tau, std::size_t d) {
  OtaConfig c;
  c.p_max = p_max;
  c.sigma2 = sigma2;
  c.tau = tau;
  c.dimension = d;
  return c;
}

TEST(Units, DbmConversion) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_NEAR(dbm_to_watts(10.0), 0.01, 1e-15);
  EXPECT_NEAR(dbm_to_watts(-90.0), 1e-12, 1e-25);
  EXPECT_NEAR(watts_to_dbm(dbm_to_watts(-17.5)), -17.5, 1e-12);
  EXPECT_THROW(watts_to_dbm(0.0), DomainError);
}

TEST(SelectUsers, BoundaryIncluded) {
  const auto sel = select_users(gains({0.5, 1.0, 2.0}), config(1, 1, 1, 1));
  EXPECT_EQ(sel, (std::vector<std::size_t>{1, 2}));
}

TEST(SelectUsers, LimitsOfTau) {
  const auto g = gains({0.01, 0.3, 5.0});
  EXPECT_EQ(select_users(g, config(1, 1, 1e9, 1)).size(), 3u);
  EXPECT_TRUE(select_users(g, config(1, 1, 1e-3, 1)).empty());
}

TEST(ZeroForcing, AllUnitCase) {
  const auto g = gains({1.0});
  const std::vector<std::size_t> sel = {0};
  const auto out = zf_power_control(g, sel, config(1, 1, 1, 1));
  EXPECT_DOUBLE_EQ(out.eta, 1.0);
  EXPECT_DOUBLE_EQ(out.scale[0], 1.0);
  EXPECT_DOUBLE_EQ(out.realized_mse, 1.0);
}

TEST(ZeroForcing, TwoUsersHandEvaluation) {
  const auto g = gains({1.0, 0.5});
  const std::vector<std::size_t> sel = {0, 1};
  const auto out = zf_power_control(g, sel, config(2, 1, 10, 1));
  EXPECT_DOUBLE_EQ(out.eta, 1.0);
  EXPECT_DOUBLE_EQ(out.realized_mse, 1.0);
  EXPECT_DOUBLE_EQ(out.scale[1] * out.scale[1], 2.0);  // = p_max at the weakest user
  EXPECT_DOUBLE_EQ(out.scale[0] * out.scale[0], 1.0);
}

TEST(ZeroForcing, MseScalesWithNoise) {
  const auto g = gains({0.7, 2.0, 1.1});
  const std::vector<std::size_t> sel = {0, 1, 2};
  const auto a = zf_power_control(g, sel, config(0.5, 1.0, 100, 4));
  const auto b = zf_power_control(g, sel, config(0.5, 3.0, 100, 4));
  EXPECT_DOUBLE_EQ(b.realized_mse, 3.0 * a.realized_mse);
  EXPECT_EQ(a.selected, b.selected);
}

TEST(ZeroForcing, EmptySelectionIsDistinctError) {
  const auto g = gains({1.0});
  const std::vector<std::size_t> none;
  EXPECT_THROW(zf_power_control(g, none, config(1, 1, 1, 1)), NoParticipantsError);
  EXPECT_THROW(mse_realization(g, none, config(1, 1, 1, 1)), NoParticipantsError);
  EXPECT_THROW(select_and_scale(gains({1e-6}), config(1, 1, 1, 1)), NoParticipantsError);
}

TEST(MseRealization, HandValues) {
  const auto g = gains({4.0, 1.0});
  const std::vector<std::size_t> sel = {0, 1};
  EXPECT_DOUBLE_EQ(mse_realization(g, sel, config(1, 2, 1, 1)), 2.0);
  EXPECT_DOUBLE_EQ(normalized_mse_realization(g, sel, config(1, 2, 1, 1)), 1.0);
}

TEST(MseRealization, BottleneckLaw) {
  auto g = gains({4.0, 1.0, 3.0});
  const std::vector<std::size_t> sel = {0, 1, 2};
  const auto cfg = config(0.3, 0.7, 1, 1);
  const double base = mse_realization(g, sel, cfg);
  g.gain[0] = 9.0;
  g.gain[2] = 1.5;
  EXPECT_DOUBLE_EQ(mse_realization(g, sel, cfg), base);
  const auto more = gains({4.0, 1.0, 3.0, 2.0});
  const std::vector<std::size_t> sel4 = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(mse_realization(more, sel4, cfg), base);
}

TEST(ZeroForcing, RandomRoundsAreFeasible) {
  RngStream rng(5);
  const auto cfg = config(0.01, 1e-3, 0.05, 7);
  std::size_t rounds = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto eff = select_ports(sample_gains(Clayton{1.0}, 20, 10, rng));
    const auto sel = select_users(eff, cfg);
    if (sel.empty()) continue;
    ++rounds;
    const auto out = zf_power_control(eff, sel, cfg);
    EXPECT_LE(out.realized_mse, cfg.tau * (1.0 + 1e-12));
    double min_gain = 1e300;
    for (auto k : sel) min_gain = std::min(min_gain, eff.gain[k]);
    for (std::size_t i = 0; i < sel.size(); ++i) {
      const double power = out.scale[i] * out.scale[i] / static_cast<double>(cfg.dimension);
      EXPECT_LE(power, cfg.p_max * (1.0 + 1e-12));
      if (eff.gain[sel[i]] == min_gain) EXPECT_NEAR(power, cfg.p_max, 1e-12 * cfg.p_max);
    }
  }
  EXPECT_GT(rounds, 1000u);
}

TEST(Aggregate, NoiselessIsArithmeticMean) {
  RngStream rng(1);
  Eigen::MatrixXd u(3, 4);
  u << 1, 2, 3, 4, 5, 6, 7, 8, -1, 0, 2, 9;
  SelectionOutcome out;
  out.selected = {0, 1, 2};
  out.eta = 0.3;
  const auto est = ota_aggregate(u, out, config(1, 0.0, 1, 4), rng);
  const Eigen::VectorXd mean = u.colwise().mean().transpose();
  EXPECT_LT((est - mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Aggregate, PureNoiseVariance) {
  const std::size_t d = 100000;
  RngStream rng(2);
  SelectionOutcome out;
  out.selected = {0};
  out.eta = 0.4;
  const auto cfg = config(1, 2.0, 1, d);
  const auto est = ota_aggregate(Eigen::MatrixXd::Zero(1, d), out, cfg, rng);
  const double var = est.squaredNorm() / static_cast<double>(d);
  EXPECT_NEAR(var, cfg.sigma2 / out.eta, 0.05 * cfg.sigma2 / out.eta);
}

TEST(Aggregate, ErrorEnergyAndMean) {
  const std::size_t d = 1000;
  const std::size_t draws = 1000;
  const auto cfg = config(1, 0.5, 1, d);
  SelectionOutcome out;
  out.selected = {0, 1};
  out.eta = 2.0;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, d);
  u.row(0).setConstant(1.0);
  u.row(1).setConstant(3.0);
  double energy = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < draws; ++r) {
    RngStream rng(3, r);
    const Eigen::VectorXd err = ota_aggregate(u, out, cfg, rng).array() - 2.0;
    // Scale by |S| to undo the 1/|S| averaging and recover z/sqrt(eta).
    energy += (2.0 * err).squaredNorm();
    sum += err.sum();
  }
  const double expected = static_cast<double>(d) * cfg.sigma2 / out.eta;
  EXPECT_NEAR(energy / draws, expected, 0.05 * expected);
  const double per_entry_sd = std::sqrt(cfg.sigma2 / out.eta) / 2.0;
  const double n = static_cast<double>(d * draws);
  EXPECT_NEAR(sum / n, 0.0, 3.0 * per_entry_sd / std::sqrt(n));
}

TEST(Aggregate, DimensionErrors) {
  RngStream rng(4);
  SelectionOutcome out;
  out.selected = {0, 1};
  out.eta = 1.0;
  EXPECT_THROW(ota_aggregate(Eigen::MatrixXd::Zero(3, 2), out, config(1, 1, 1, 2), rng),
               DimensionError);
  EXPECT_THROW(ota_aggregate(Eigen::MatrixXd::Zero(2, 3), out, config(1, 1, 1, 2), rng),
               DimensionError);
}

TEST(OtaConfig, Validation) {
  EXPECT_THROW(config(0, 1, 1, 1).validate(), DomainError);
  EXPECT_THROW(config(1, -1, 1, 1).validate(), DomainError);
  EXPECT_THROW(config(1, 1, 0, 1).validate(), DomainError);
  EXPECT_THROW(config(1, 1, 1, 0).validate(), DomainError);
  EXPECT_NO_THROW(config(1, 0, 1, 1).validate());
}

}  // namespace
}  // namespace faota
