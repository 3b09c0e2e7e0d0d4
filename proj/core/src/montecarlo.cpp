#include "faota/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "faota/errors.hpp"
#include "faota/rng.hpp"
#include "faota/stats.hpp"

namespace faota {
namespace {

template <class T>
void check_sorted_nonempty(const std::vector<T>& grid, const char* name) {
  if (grid.empty()) throw DomainError(std::string(name) + " must not be empty");
  if (!std::ranges::is_sorted(grid)) throw DomainError(std::string(name) + " must be sorted");
}

std::vector<std::uint64_t> sum_counts(const std::vector<std::vector<std::uint64_t>>& accs) {
  std::vector<std::uint64_t> total(accs.front().size(), 0);
  for (const auto& a : accs) {
    for (std::size_t i = 0; i < a.size(); ++i) total[i] += a[i];
  }
  return total;
}

bool has_closed_form(const DependenceSpec& dep) {
  return !std::holds_alternative<GaussianJakes>(dep);
}

double marginal_cdf(const DependenceSpec& dep, double x) {
  const double scale = std::holds_alternative<GaussianJakes>(dep)
                           ? std::get<GaussianJakes>(dep).delta2
                           : 1.0;
  return x <= 0.0 ? 0.0 : -std::expm1(-x / scale);
}

nlohmann::ordered_json plan_meta(const McPlan& plan, const DependenceSpec& dep) {
  nlohmann::ordered_json m;
  m["variant"] = dependence_label(dep);
  m["K"] = plan.users;
  m["N"] = plan.ports;
  if (const auto* c = std::get_if<Clayton>(&dep)) m["beta"] = c->beta;
  m["p_max"] = plan.p_max;
  m["sigma2"] = plan.sigma2;
  m["tau"] = plan.tau;
  m["S"] = plan.selected;
  m["trials"] = plan.trials;
  m["seed"] = plan.seed;
  return m;
}

}  // namespace

void McPlan::validate() const {
  if (trials < 1) throw DomainError("Monte Carlo plan needs at least one trial");
  if (users < 1 || ports < 1) throw DomainError("K and N must be at least 1");
  if (selected < 1 || selected > users) throw DomainError("|S| must lie in [1, K]");
  if (!(p_max > 0.0) || !(sigma2 > 0.0) || !(tau > 0.0)) {
    throw DomainError("p_max, sigma2 and tau must be positive");
  }
  if (variants.empty()) throw DomainError("Monte Carlo plan needs at least one variant");
  for (const auto& v : variants) faota::validate(v);
  if (!tau_grid.empty()) check_sorted_nonempty(tau_grid, "tau grid");
  if (!port_grid.empty()) check_sorted_nonempty(port_grid, "port grid");
  if (!gain_grid.empty()) check_sorted_nonempty(gain_grid, "gain grid");
}

std::vector<DependenceSpec> McPlan::standard_variants() {
  return {Independent{}, Clayton{1.0}, Clayton{2.0}, PerfectDependence{}};
}

std::vector<double> default_tau_grid(double p_max, std::size_t points) {
  if (!(p_max > 0.0)) throw DomainError("p_max must be positive");
  return log_grid(0.05 / p_max, 50.0 / p_max, points);
}

std::vector<double> quantile_gain_grid(const GainDistribution& dist, double lo_p, double hi_p,
                                       std::size_t points) {
  if (!(lo_p > 0.0 && lo_p < hi_p && hi_p < 1.0)) {
    throw DomainError("quantile grid needs 0 < lo_p < hi_p < 1");
  }
  auto quantile = [&](double p) {
    double lo = 0.0;
    double hi = 1.0;
    while (channel_gain_cdf(dist, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (channel_gain_cdf(dist, mid) < p ? lo : hi) = mid;
    }
    return hi;
  };
  return log_grid(quantile(lo_p), quantile(hi_p), points);
}

void ComparisonReport::add(double x, double empirical, double analytic) {
  ComparisonPoint p;
  p.x = x;
  p.empirical = empirical;
  p.analytic = analytic;
  p.std_error = proportion_stderr(empirical, trials);
  // Without a closed form the point is report-only.
  p.pass = std::isnan(analytic) ||
           std::fabs(empirical - analytic) <= std::max(kSigmas * p.std_error, kFloor);
  points.push_back(p);
}

bool ComparisonReport::passed() const {
  return std::ranges::all_of(points, [](const ComparisonPoint& p) { return p.pass; });
}

double ComparisonReport::sup_gap() const {
  double gap = 0.0;
  for (const auto& p : points) gap = std::max(gap, std::fabs(p.empirical - p.analytic));
  return gap;
}

std::optional<ComparisonPoint> ComparisonReport::first_failure() const {
  for (const auto& p : points) {
    if (!p.pass) return p;
  }
  return std::nullopt;
}

void ComparisonReport::write_csv(std::ostream& os) const {
  os << "x,analytic,empirical,stderr,pass\n";
  for (const auto& p : points) {
    os << format_double(p.x) << ',' << format_double(p.analytic) << ','
       << format_double(p.empirical) << ',' << format_double(p.std_error) << ','
       << (p.pass ? 1 : 0) << '\n';
  }
}

nlohmann::ordered_json ComparisonReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["trials"] = trials;
  j["pass"] = passed();
  j["sup_gap"] = sup_gap();
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : points) {
    pts.push_back({{"x", p.x},
                   {"analytic", p.analytic},
                   {"empirical", p.empirical},
                   {"stderr", p.std_error},
                   {"pass", p.pass}});
  }
  return j;
}

std::vector<VariantComparison> run_mse_cdf_experiment(const McPlan& plan) {
  plan.validate();
  const auto grid = plan.tau_grid.empty() ? default_tau_grid(plan.p_max) : plan.tau_grid;
  std::vector<VariantComparison> out;
  for (const auto& dep : plan.variants) {
    const auto counts = sum_counts(parallel_trials(
        plan.trials, plan.threads, std::vector<std::uint64_t>(grid.size(), 0),
        [&](std::size_t t, std::vector<std::uint64_t>& acc) {
          RngStream rng(plan.seed, t);
          const auto eff = select_ports(sample_gains(dep, plan.users, plan.ports, rng));
          std::vector<double> theta(eff.gain.size());
          std::ranges::transform(eff.gain, theta.begin(),
                                 [&](double g) { return 1.0 / (plan.p_max * g); });
          std::ranges::nth_element(theta, theta.begin() + static_cast<std::ptrdiff_t>(plan.selected - 1));
          const double gamma = theta[plan.selected - 1];
          for (std::size_t i = 0; i < grid.size(); ++i) {
            if (gamma < grid[i]) ++acc[i];
          }
        }));

    VariantComparison vc;
    vc.variant = dependence_label(dep);
    vc.report.name = "mse_cdf/" + vc.variant;
    vc.report.trials = plan.trials;
    vc.analytic.meta = plan_meta(plan, dep);
    const GainDistribution dist{plan.ports, dep};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double emp = static_cast<double>(counts[i]) / static_cast<double>(plan.trials);
      double ana = std::numeric_limits<double>::quiet_NaN();
      if (has_closed_form(dep)) {
        ana = normalized_mse_cdf(dist, plan.users, plan.selected, plan.p_max, grid[i]);
        vc.analytic.abscissae.push_back(grid[i]);
        vc.analytic.values.push_back(ana);
      }
      vc.report.add(grid[i], emp, ana);
    }
    out.push_back(std::move(vc));
  }
  return out;
}

std::vector<ParticipationComparison> run_participation_experiment(const McPlan& plan) {
  plan.validate();
  const double threshold = plan.sigma2 / (plan.p_max * plan.tau);
  const std::size_t k_users = plan.users;
  std::vector<ParticipationComparison> out;
  for (const auto& dep : plan.variants) {
    // Layout: histogram[0..K], then sum of Gamma, then sum of Gamma^2.
    const auto counts = sum_counts(parallel_trials(
        plan.trials, plan.threads, std::vector<std::uint64_t>(k_users + 3, 0),
        [&](std::size_t t, std::vector<std::uint64_t>& acc) {
          RngStream rng(plan.seed, t);
          const auto eff = select_ports(sample_gains(dep, k_users, plan.ports, rng));
          const auto gamma = static_cast<std::uint64_t>(
              std::ranges::count_if(eff.gain, [&](double g) { return g >= threshold; }));
          ++acc[gamma];
          acc[k_users + 1] += gamma;
          acc[k_users + 2] += gamma * gamma;
        }));

    ParticipationComparison pc;
    pc.variant = dependence_label(dep);
    pc.pmf.name = "participation/" + pc.variant;
    pc.pmf.trials = plan.trials;
    const auto m = static_cast<double>(plan.trials);
    std::vector<double> analytic(k_users + 1, std::numeric_limits<double>::quiet_NaN());
    if (has_closed_form(dep)) {
      const GainDistribution dist{plan.ports, dep};
      analytic = participation_pmf_vector(dist, k_users, plan.p_max, plan.sigma2, plan.tau);
      pc.qualify_probability = qualify_probability(dist, threshold);
    }
    std::size_t mode = 0;
    for (std::size_t s = 0; s <= k_users; ++s) {
      pc.pmf.add(static_cast<double>(s), static_cast<double>(counts[s]) / m, analytic[s]);
      if (counts[s] > counts[mode]) mode = s;
      pc.analytic.abscissae.push_back(static_cast<double>(s));
      pc.analytic.values.push_back(analytic[s]);
    }
    pc.analytic.meta = plan_meta(plan, dep);
    pc.mode_empirical = mode;
    pc.mean_empirical = static_cast<double>(counts[k_users + 1]) / m;
    const double second = static_cast<double>(counts[k_users + 2]) / m;
    const double var = std::max(second - pc.mean_empirical * pc.mean_empirical, 0.0);
    pc.mean_stderr = std::sqrt(var / m);
    pc.mean_analytic = static_cast<double>(k_users) * pc.qualify_probability;
    pc.mean_pass = has_closed_form(dep) &&
                   std::fabs(pc.mean_empirical - pc.mean_analytic) <=
                       std::max(ComparisonReport::kSigmas * pc.mean_stderr, ComparisonReport::kFloor);
    out.push_back(std::move(pc));
  }
  return out;
}

std::vector<VariantComparison> run_port_sweep(const McPlan& plan) {
  plan.validate();
  std::vector<std::size_t> grid = plan.port_grid;
  if (grid.empty()) {
    for (std::size_t n = 1; n <= 20; ++n) grid.push_back(n);
  }
  if (grid.front() < 1) throw DomainError("port grid values must be >= 1");
  const double threshold = plan.sigma2 / (plan.p_max * plan.tau);

  std::vector<VariantComparison> out;
  for (const auto& dep : plan.variants) {
    VariantComparison vc;
    vc.variant = dependence_label(dep);
    vc.report.name = "port_sweep/" + vc.variant;
    vc.report.trials = plan.trials;
    vc.analytic.meta = plan_meta(plan, dep);
    vc.analytic.meta["quantity"] = "Pr(Gamma = K)";
    for (auto n : grid) {
      const auto full = sum_counts(parallel_trials(
          plan.trials, plan.threads, std::vector<std::uint64_t>(1, 0),
          [&](std::size_t t, std::vector<std::uint64_t>& acc) {
            RngStream rng(plan.seed, t);
            const auto eff = select_ports(sample_gains(dep, plan.users, n, rng));
            if (std::ranges::all_of(eff.gain, [&](double g) { return g >= threshold; })) ++acc[0];
          }))[0];
      double ana = std::numeric_limits<double>::quiet_NaN();
      if (has_closed_form(dep)) {
        const double q = qualify_probability(GainDistribution{n, dep}, threshold);
        ana = binomial_pmf(plan.users, q, plan.users);
      }
      vc.analytic.abscissae.push_back(static_cast<double>(n));
      vc.analytic.values.push_back(ana);
      vc.report.add(static_cast<double>(n),
                    static_cast<double>(full) / static_cast<double>(plan.trials), ana);
    }
    out.push_back(std::move(vc));
  }
  return out;
}

std::optional<double> expected_kendall_tau(const DependenceSpec& dep) {
  if (std::holds_alternative<Independent>(dep)) return 0.0;
  if (std::holds_alternative<PerfectDependence>(dep)) return 1.0;
  if (const auto* c = std::get_if<Clayton>(&dep)) return c->beta / (c->beta + 2.0);
  return std::nullopt;
}

bool CopulaDiagnostics::passed() const {
  return std::ranges::all_of(variants, [](const CopulaDiagnostic& d) {
    return d.ks_pass && d.tau_pass && (!d.max_cdf || d.max_cdf->passed());
  });
}

CopulaDiagnostics run_copula_diagnostics(const McPlan& plan) {
  plan.validate();
  const std::size_t rows = plan.trials;
  const std::size_t n = plan.ports;

  // One row of N port gains per trial, written at the trial's index.
  auto draw = [&](const DependenceSpec& dep) {
    std::vector<double> data(rows * n);
    parallel_trials(rows, plan.threads, 0, [&](std::size_t t, int&) {
      RngStream rng(plan.seed, t);
      const auto g = sample_gains(dep, 1, n, rng);
      std::ranges::copy(g.row(0), data.begin() + static_cast<std::ptrdiff_t>(t * n));
    });
    return data;
  };
  auto column = [&](const std::vector<double>& data, std::size_t port) {
    std::vector<double> c(rows);
    for (std::size_t r = 0; r < rows; ++r) c[r] = data[r * n + port];
    return c;
  };
  auto row_max = [&](const std::vector<double>& data) {
    std::vector<double> m(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      m[r] = *std::max_element(data.begin() + static_cast<std::ptrdiff_t>(r * n),
                               data.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
    }
    std::ranges::sort(m);
    return m;
  };
  auto ecdf = [&](const std::vector<double>& sorted, double x) {
    const auto below = std::ranges::lower_bound(sorted, x) - sorted.begin();
    return static_cast<double>(below) / static_cast<double>(sorted.size());
  };

  CopulaDiagnostics out;
  for (const auto& dep : plan.variants) {
    CopulaDiagnostic d;
    d.variant = dependence_label(dep);
    const auto data = draw(dep);

    // Bonferroni over ports: the max of n per-port statistics at family level 1%.
    d.ks_critical = ks_critical_value(rows, 0.01 / static_cast<double>(n));
    for (std::size_t p = 0; p < n; ++p) {
      d.ks_max = std::max(d.ks_max, ks_statistic(column(data, p), [&](double x) {
                            return marginal_cdf(dep, x);
                          }));
    }
    d.ks_pass = d.ks_max < d.ks_critical;

    if (n >= 2 && rows >= 2) {
      d.kendall_tau = kendall_tau(column(data, 0), column(data, 1));
      d.kendall_tau_expected = expected_kendall_tau(dep);
      if (d.kendall_tau_expected) {
        d.tau_pass = std::fabs(*d.kendall_tau - *d.kendall_tau_expected) <= 0.02;
      }
    }

    if (has_closed_form(dep)) {
      const GainDistribution dist{n, dep};
      const auto grid =
          plan.gain_grid.empty() ? quantile_gain_grid(dist, 1e-3, 0.999, 30) : plan.gain_grid;
      const auto maxima = row_max(data);
      ComparisonReport rep;
      rep.name = "max_cdf/" + d.variant;
      rep.trials = rows;
      for (double x : grid) rep.add(x, ecdf(maxima, x), channel_gain_cdf(dist, x));
      d.max_cdf = std::move(rep);
    }
    out.variants.push_back(std::move(d));
  }

  // Gaussian-Jakes reference at matched (N, W); no equivalence is claimed.
  const GaussianJakes jakes{plan.jakes_aperture, 1.0};
  const auto jakes_max = row_max(draw(jakes));
  const auto grid = plan.gain_grid.empty()
                        ? quantile_gain_grid(GainDistribution{n, Independent{}}, 1e-3, 0.999, 30)
                        : plan.gain_grid;
  nlohmann::ordered_json cross;
  cross["N"] = n;
  cross["W"] = plan.jakes_aperture;
  cross["rows"] = rows;
  cross["grid"] = grid;
  std::vector<double> emp;
  for (double x : grid) emp.push_back(ecdf(jakes_max, x));
  cross["jakes_empirical"] = emp;
  auto& analytic = cross["analytic"] = nlohmann::ordered_json::object();
  for (const auto& dep : plan.variants) {
    if (!has_closed_form(dep)) continue;
    std::vector<double> vals;
    for (double x : grid) vals.push_back(channel_gain_cdf(GainDistribution{n, dep}, x));
    analytic[dependence_label(dep)] = vals;
  }
  out.jakes_cross_check = std::move(cross);
  return out;
}

}  // namespace faota
