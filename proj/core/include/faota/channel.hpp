#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "faota/rng.hpp"

namespace faota {

/// Linear placement of N fluid-antenna ports over an aperture of W wavelengths.
struct PortGeometry {
  std::size_t n_ports = 1;
  double aperture = 0.0;  // W, in wavelengths

  PortGeometry() = default;
  PortGeometry(std::size_t n, double w);

  /// Displacement of port `n` (1-based) from port 1, in wavelengths.
  double displacement(std::size_t n) const;
};

struct Independent {};
struct PerfectDependence {};
struct Clayton {
  double beta = 1.0;
};
struct GaussianJakes {
  double aperture = 0.0;
  double delta2 = 1.0;
};

/// Spatial dependence between the ports of one user.
using DependenceSpec = std::variant<Independent, Clayton, PerfectDependence, GaussianJakes>;

/// Short stable label, e.g. "independent", "clayton-2", "fpa", "jakes-0.5".
std::string dependence_label(const DependenceSpec& dep);

/// Parses "independent", "fpa", "clayton:<beta>" or "jakes:<W>[:<delta2>]".
DependenceSpec parse_dependence(std::string_view text);

/// Throws DomainError on an invalid parameterization (Clayton beta <= 0 etc).
void validate(const DependenceSpec& dep);

/// K x N matrix of per-port channel power gains for one round.
class PortGainMatrix {
 public:
  PortGainMatrix() = default;
  PortGainMatrix(std::size_t users, std::size_t ports, SeedInfo seed = {});

  std::size_t users() const noexcept { return users_; }
  std::size_t ports() const noexcept { return ports_; }
  const SeedInfo& seed_info() const noexcept { return seed_; }

  double& operator()(std::size_t k, std::size_t n) { return data_[k * ports_ + n]; }
  double operator()(std::size_t k, std::size_t n) const { return data_[k * ports_ + n]; }

  std::span<double> row(std::size_t k) { return {data_.data() + k * ports_, ports_}; }
  std::span<const double> row(std::size_t k) const { return {data_.data() + k * ports_, ports_}; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const PortGainMatrix& other) const = default;

 private:
  std::size_t users_ = 0;
  std::size_t ports_ = 0;
  SeedInfo seed_{};
  std::vector<double> data_;
};

/// Per-user best-port gain and the (0-based) port that attains it.
struct EffectiveGains {
  std::vector<double> gain;
  std::vector<std::size_t> port;
};

/// Clayton-copula dependent ports with Exp(1) marginals (latent-Gamma construction).
PortGainMatrix sample_clayton_exponential(std::size_t users, std::size_t ports, double beta,
                                          RngStream& rng);

/// All entries i.i.d. Exp(1).
PortGainMatrix sample_independent(std::size_t users, std::size_t ports, RngStream& rng);

/// One Exp(1) draw per user, repeated across its ports (fixed-position antenna).
PortGainMatrix sample_perfect_dependence(std::size_t users, std::size_t ports, RngStream& rng);

/// Jakes spatial covariance: delta2 * J0(2*pi*|i-j|*W/(N-1)).
Eigen::MatrixXd jakes_correlation_matrix(const PortGeometry& geometry, double delta2);

/// Squared magnitudes of circularly-symmetric complex Gaussian port vectors with Jakes
/// covariance. Marginals are Exp(delta2).
PortGainMatrix sample_gaussian_jakes(std::size_t users, const PortGeometry& geometry,
                                     double delta2, RngStream& rng);

/// Dispatches on `dep`. For GaussianJakes the aperture and delta2 come from the variant.
PortGainMatrix sample_gains(const DependenceSpec& dep, std::size_t users, std::size_t ports,
                            RngStream& rng);

/// Per-row maximum; ties go to the lowest port index.
EffectiveGains select_ports(const PortGainMatrix& gains);

/// Bessel function of the first kind, order zero. Piecewise polynomial/asymptotic
/// approximation with absolute error below 1e-7 on the whole real line.
double bessel_j0(double x);

}  // namespace faota
