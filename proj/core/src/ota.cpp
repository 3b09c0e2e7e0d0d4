#include "faota/ota.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "faota/errors.hpp"

namespace faota {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) throw DomainError("power must be positive to express in dBm");
  return 10.0 * std::log10(watts) + 30.0;
}

void OtaConfig::validate() const {
  if (!(p_max > 0.0) || !std::isfinite(p_max)) throw DomainError("p_max must be positive");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("sigma2 must be nonnegative");
  }
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  if (dimension == 0) throw DomainError("model dimension d must be positive");
}

std::vector<std::size_t> select_users(const EffectiveGains& effective, const OtaConfig& cfg) {
  cfg.validate();
  const double threshold = cfg.gain_threshold();
  std::vector<std::size_t> selected;
  for (std::size_t k = 0; k < effective.gain.size(); ++k) {
    const double g = effective.gain[k];
    if (!(g >= 0.0)) throw DomainError("effective gains must be nonnegative");
    if (g >= threshold) selected.push_back(k);
  }
  return selected;
}

double mse_realization(const EffectiveGains& effective, std::span<const std::size_t> selected,
                       const OtaConfig& cfg) {
  return cfg.sigma2 * normalized_mse_realization(effective, selected, cfg);
}

double normalized_mse_realization(const EffectiveGains& effective,
                                  std::span<const std::size_t> selected, const OtaConfig& cfg) {
  cfg.validate();
  if (selected.empty()) throw NoParticipantsError();
  double weakest = std::numeric_limits<double>::infinity();
  for (auto k : selected) {
    if (k >= effective.gain.size()) throw DimensionError("selected user index out of range");
    weakest = std::min(weakest, effective.gain[k]);
  }
  if (!(weakest > 0.0)) throw DomainError("selected user has zero effective gain");
  return 1.0 / (cfg.p_max * weakest);
}

SelectionOutcome zf_power_control(const EffectiveGains& effective,
                                  std::span<const std::size_t> selected, const OtaConfig& cfg) {
  cfg.validate();
  if (selected.empty()) throw NoParticipantsError();
  SelectionOutcome out;
  out.selected.assign(selected.begin(), selected.end());

  double weakest = std::numeric_limits<double>::infinity();
  for (auto k : selected) {
    if (k >= effective.gain.size()) throw DimensionError("selected user index out of range");
    weakest = std::min(weakest, effective.gain[k]);
  }
  if (!(weakest > 0.0)) throw DomainError("selected user has zero effective gain");

  // The power budget binds at the weakest user.
  out.eta = static_cast<double>(cfg.dimension) * cfg.p_max * weakest;
  out.scale.reserve(selected.size());
  for (auto k : selected) out.scale.push_back(std::sqrt(out.eta / effective.gain[k]));
  out.realized_mse = cfg.sigma2 / (cfg.p_max * weakest);
  return out;
}

SelectionOutcome select_and_scale(const EffectiveGains& effective, const OtaConfig& cfg) {
  const auto selected = select_users(effective, cfg);
  return zf_power_control(effective, selected, cfg);
}

Eigen::VectorXd ota_aggregate(const Eigen::Ref<const Eigen::MatrixXd>& updates,
                              const SelectionOutcome& outcome, const OtaConfig& cfg,
                              RngStream& rng) {
  cfg.validate();
  if (outcome.selected.empty()) throw NoParticipantsError();
  if (static_cast<std::size_t>(updates.rows()) != outcome.selected.size()) {
    std::ostringstream os;
    os << "ota_aggregate: " << updates.rows() << " update rows for "
       << outcome.selected.size() << " selected users";
    throw DimensionError(os.str());
  }
  if (static_cast<std::size_t>(updates.cols()) != cfg.dimension) {
    std::ostringstream os;
    os << "ota_aggregate: update dimension " << updates.cols() << " != d = " << cfg.dimension;
    throw DimensionError(os.str());
  }
  if (!(outcome.eta > 0.0)) throw DomainError("denoising factor eta must be positive");

  Eigen::VectorXd sum = updates.colwise().sum().transpose();
  if (cfg.sigma2 > 0.0) {
    const double noise_scale = std::sqrt(cfg.sigma2 / outcome.eta);
    for (Eigen::Index i = 0; i < sum.size(); ++i) sum(i) += noise_scale * rng.normal();
  }
  return sum / static_cast<double>(outcome.selected.size());
}

}  // namespace faota
