#include "faota/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "faota/errors.hpp"

namespace faota {
namespace {

void check_dims(std::size_t users, std::size_t ports) {
  if (users == 0 || ports == 0) {
    throw DomainError("gain matrix needs at least one user and one port");
  }
}

double parse_double(std::string_view s, std::string_view whole) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw DomainError("cannot parse number in dependence spec '" + std::string(whole) + "'");
  }
  return v;
}

// log(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// log of a Gamma(shape, 1) variate. Small shapes go through
// Gamma(a) = Gamma(a + 1) * U^(1/a) so the result never underflows.
double log_gamma_variate(double shape, RngStream& rng) {
  if (shape >= 1.0) {
    return std::log(std::gamma_distribution<double>(shape, 1.0)(rng.engine()));
  }
  const double g = std::gamma_distribution<double>(shape + 1.0, 1.0)(rng.engine());
  const double u = 1.0 - rng.uniform();
  return std::log(g) + std::log(u) / shape;
}

}  // namespace

PortGeometry::PortGeometry(std::size_t n, double w) : n_ports(n), aperture(w) {
  if (n == 0) throw DomainError("PortGeometry requires at least one port");
  if (!(w >= 0.0)) throw DomainError("PortGeometry aperture must be nonnegative");
}

double PortGeometry::displacement(std::size_t n) const {
  if (n < 1 || n > n_ports) throw DomainError("port index out of range");
  if (n_ports == 1) return 0.0;
  return static_cast<double>(n - 1) / static_cast<double>(n_ports - 1) * aperture;
}

std::string dependence_label(const DependenceSpec& dep) {
  struct Visitor {
    std::string operator()(const Independent&) const { return "independent"; }
    std::string operator()(const PerfectDependence&) const { return "fpa"; }
    std::string operator()(const Clayton& c) const {
      std::ostringstream os;
      os << "clayton-" << c.beta;
      return os.str();
    }
    std::string operator()(const GaussianJakes& j) const {
      std::ostringstream os;
      os << "jakes-" << j.aperture;
      return os.str();
    }
  };
  return std::visit(Visitor{}, dep);
}

DependenceSpec parse_dependence(std::string_view text) {
  if (text == "independent" || text == "iid") return Independent{};
  if (text == "fpa" || text == "perfect") return PerfectDependence{};
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  if (colon != std::string_view::npos) {
    const auto rest = text.substr(colon + 1);
    if (head == "clayton") {
      DependenceSpec dep = Clayton{parse_double(rest, text)};
      validate(dep);
      return dep;
    }
    if (head == "jakes") {
      const auto c2 = rest.find(':');
      GaussianJakes j;
      j.aperture = parse_double(rest.substr(0, c2), text);
      if (c2 != std::string_view::npos) j.delta2 = parse_double(rest.substr(c2 + 1), text);
      DependenceSpec dep = j;
      validate(dep);
      return dep;
    }
  }
  throw DomainError("unknown dependence spec '" + std::string(text) +
                    "' (expected independent, fpa, clayton:<beta>, jakes:<W>[:<delta2>])");
}

void validate(const DependenceSpec& dep) {
  if (const auto* c = std::get_if<Clayton>(&dep)) {
    if (!(c->beta > 0.0) || !std::isfinite(c->beta)) {
      throw DomainError("Clayton dependence requires a finite beta > 0");
    }
  } else if (const auto* j = std::get_if<GaussianJakes>(&dep)) {
    if (!(j->aperture >= 0.0)) throw DomainError("Jakes aperture must be nonnegative");
    if (!(j->delta2 > 0.0)) throw DomainError("Jakes delta2 must be positive");
  }
}

PortGainMatrix::PortGainMatrix(std::size_t users, std::size_t ports, SeedInfo seed)
    : users_(users), ports_(ports), seed_(seed), data_(users * ports, 0.0) {}

PortGainMatrix sample_clayton_exponential(std::size_t users, std::size_t ports, double beta,
                                          RngStream& rng) {
  check_dims(users, ports);
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("Clayton sampler requires a finite beta > 0");
  }
  PortGainMatrix out(users, ports, rng.info());
  const double shape = 1.0 / beta;
  for (std::size_t k = 0; k < users; ++k) {
    const double log_v = log_gamma_variate(shape, rng);
    for (std::size_t n = 0; n < ports; ++n) {
      const double e = rng.exponential();
      // U = (1 + E/V)^(-1/beta), gain = -ln(1 - U), both evaluated in log space.
      const double log_u = -softplus(std::log(e) - log_v) / beta;
      const double g = -std::log(-std::expm1(log_u));
      if (!std::isfinite(g)) {
        throw NumericalError("Clayton sampler produced a nonfinite gain (beta=" +
                             std::to_string(beta) + ")");
      }
      out(k, n) = g;
    }
  }
  return out;
}

PortGainMatrix sample_independent(std::size_t users, std::size_t ports, RngStream& rng) {
  check_dims(users, ports);
  PortGainMatrix out(users, ports, rng.info());
  for (std::size_t k = 0; k < users; ++k) {
    for (std::size_t n = 0; n < ports; ++n) out(k, n) = rng.exponential();
  }
  return out;
}

PortGainMatrix sample_perfect_dependence(std::size_t users, std::size_t ports, RngStream& rng) {
  check_dims(users, ports);
  PortGainMatrix out(users, ports, rng.info());
  for (std::size_t k = 0; k < users; ++k) {
    const double g = rng.exponential();
    std::ranges::fill(out.row(k), g);
  }
  return out;
}

Eigen::MatrixXd jakes_correlation_matrix(const PortGeometry& geometry, double delta2) {
  const auto n = geometry.n_ports;
  if (n == 0) throw DomainError("Jakes matrix needs at least one port");
  if (!(delta2 > 0.0)) throw DomainError("Jakes delta2 must be positive");
  Eigen::MatrixXd r(n, n);
  if (n == 1) {
    r(0, 0) = delta2;
    return r;
  }
  const double step = 2.0 * std::numbers::pi * geometry.aperture / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    r(i, i) = delta2;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = delta2 * bessel_j0(step * static_cast<double>(j - i));
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

PortGainMatrix sample_gaussian_jakes(std::size_t users, const PortGeometry& geometry,
                                     double delta2, RngStream& rng) {
  check_dims(users, geometry.n_ports);
  const Eigen::MatrixXd cov = jakes_correlation_matrix(geometry, delta2);
  const auto n = static_cast<Eigen::Index>(geometry.n_ports);

  // Densely packed ports make the covariance numerically rank deficient, and the
  // J0 approximation error (<= 1e-7 per entry) can push its smallest eigenvalues
  // slightly below zero. Eigenvalues down to -N * 1e-7 * delta2 (a bound on the
  // spectral norm of the entrywise error) are clamped to zero; anything more
  // negative is reported.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("Jakes covariance eigendecomposition failed");
  }
  const double tolerance = static_cast<double>(n) * 1e-7 * delta2;
  Eigen::VectorXd root = eig.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (root(i) < -tolerance) {
      std::ostringstream os;
      os << "Jakes covariance is not positive semidefinite: eigenvalue " << root(i)
         << " (N=" << n << ", W=" << geometry.aperture << ")";
      throw NumericalError(os.str());
    }
    root(i) = std::sqrt(std::max(root(i), 0.0));
  }
  // cov = V diag(lambda) V^T, so x = V sqrt(lambda) z has covariance cov.
  const Eigen::MatrixXd factor = eig.eigenvectors() * root.asDiagonal();

  PortGainMatrix out(users, geometry.n_ports, rng.info());
  Eigen::VectorXd re(n), im(n);
  const double half = std::sqrt(0.5);
  for (std::size_t k = 0; k < users; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      re(i) = half * rng.normal();
      im(i) = half * rng.normal();
    }
    const Eigen::VectorXd hr = factor * re;
    const Eigen::VectorXd hi = factor * im;
    for (Eigen::Index i = 0; i < n; ++i) {
      out(k, static_cast<std::size_t>(i)) = hr(i) * hr(i) + hi(i) * hi(i);
    }
  }
  return out;
}

PortGainMatrix sample_gains(const DependenceSpec& dep, std::size_t users, std::size_t ports,
                            RngStream& rng) {
  validate(dep);
  if (std::holds_alternative<Independent>(dep)) return sample_independent(users, ports, rng);
  if (std::holds_alternative<PerfectDependence>(dep)) {
    return sample_perfect_dependence(users, ports, rng);
  }
  if (const auto* c = std::get_if<Clayton>(&dep)) {
    return sample_clayton_exponential(users, ports, c->beta, rng);
  }
  const auto& j = std::get<GaussianJakes>(dep);
  return sample_gaussian_jakes(users, PortGeometry(ports, j.aperture), j.delta2, rng);
}

EffectiveGains select_ports(const PortGainMatrix& gains) {
  if (gains.users() == 0 || gains.ports() == 0) {
    throw DomainError("select_ports needs a nonempty gain matrix");
  }
  EffectiveGains eff;
  eff.gain.resize(gains.users());
  eff.port.resize(gains.users());
  for (std::size_t k = 0; k < gains.users(); ++k) {
    const auto row = gains.row(k);
    // max_element returns the first maximum, i.e. the lowest index on ties.
    const auto it = std::ranges::max_element(row);
    eff.gain[k] = *it;
    eff.port[k] = static_cast<std::size_t>(it - row.begin());
  }
  return eff;
}

}  // namespace faota
