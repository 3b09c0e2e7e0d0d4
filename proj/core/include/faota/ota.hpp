#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "faota/channel.hpp"
#include "faota/rng.hpp"

namespace faota {

/// dBm to watts: 10^((dBm - 30) / 10).
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Linear-scale parameters of one over-the-air aggregation round.
///
/// sigma2 may be zero to model a noiseless receiver; everything else must be
/// strictly positive. p_max is a per-symbol power budget: the (1/d) factor of the
/// power constraint already spreads it across the d-symbol update.
struct OtaConfig {
  double p_max = 1.0;
  double sigma2 = 1.0;
  double tau = 1.0;
  std::size_t dimension = 1;  // d

  void validate() const;
  /// Gain threshold sigma2 / (tau * p_max) a user must reach to participate.
  double gain_threshold() const { return sigma2 / (tau * p_max); }
};

/// Result of user selection and zero-forcing power control for one round.
struct SelectionOutcome {
  std::vector<std::size_t> selected;  // ascending user indices
  double eta = 0.0;                   // denoising factor
  std::vector<double> scale;          // |p_k| per selected user, same order as `selected`
  double realized_mse = 0.0;          // (sigma2 / p_max) * max_k 1/|h_k|^2
};

/// Users whose effective gain reaches the threshold, in ascending index order.
std::vector<std::size_t> select_users(const EffectiveGains& effective, const OtaConfig& cfg);

/// Zero-forcing amplitude inversion: eta = d p_max min_k |h_k|^2, |p_k| = sqrt(eta)/|h_k|.
/// Throws NoParticipantsError if `selected` is empty.
SelectionOutcome zf_power_control(const EffectiveGains& effective,
                                  std::span<const std::size_t> selected, const OtaConfig& cfg);

/// select_users followed by zf_power_control.
SelectionOutcome select_and_scale(const EffectiveGains& effective, const OtaConfig& cfg);

/// (sigma2 / p_max) * max over `selected` of 1/gain.
double mse_realization(const EffectiveGains& effective, std::span<const std::size_t> selected,
                       const OtaConfig& cfg);

/// mse_realization / sigma2.
double normalized_mse_realization(const EffectiveGains& effective,
                                  std::span<const std::size_t> selected, const OtaConfig& cfg);

/// AP estimate (1/|S|) (sum_k u_k + z / sqrt(eta)) with z_i ~ N(0, sigma2).
/// `updates` holds one row per selected user, in the order of outcome.selected.
Eigen::VectorXd ota_aggregate(const Eigen::Ref<const Eigen::MatrixXd>& updates,
                              const SelectionOutcome& outcome, const OtaConfig& cfg,
                              RngStream& rng);

}  // namespace faota
