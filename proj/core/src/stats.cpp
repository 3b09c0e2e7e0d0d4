#include "faota/stats.hpp"

#include <cmath>
#include <numeric>

#include "faota/errors.hpp"

namespace faota {
namespace {

// Counts pairs i < j with v[i] > v[j], sorting v in the process.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                               std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += mid - i;
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("kendall_tau needs equal-length samples");
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("kendall_tau needs at least two observations");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];

  // Pairs tied in x or y are neither concordant nor discordant.
  auto tied_pairs = [n](auto&& same) {
    std::uint64_t ties = 0;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i + 1;
      while (j < n && same(i, j)) ++j;
      const std::uint64_t run = j - i;
      ties += run * (run - 1) / 2;
      i = j;
    }
    return ties;
  };
  const std::uint64_t tied_x = tied_pairs([&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]];
  });
  const std::uint64_t tied_xy = tied_pairs([&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]] && ys[a] == ys[b];
  });
  std::vector<double> sorted_y = ys;
  std::ranges::sort(sorted_y);
  const std::uint64_t tied_y =
      tied_pairs([&](std::size_t a, std::size_t b) { return sorted_y[a] == sorted_y[b]; });

  std::vector<double> scratch(n);
  const std::uint64_t discordant = count_inversions(ys, scratch, 0, n);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double concordant = pairs - static_cast<double>(discordant) - static_cast<double>(tied_x) -
                            static_cast<double>(tied_y) + static_cast<double>(tied_xy);
  return (concordant - static_cast<double>(discordant)) / pairs;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("KS statistic needs samples");
  std::ranges::sort(samples);
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("KS critical value needs n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("KS significance level must lie in (0, 1)");
  // Asymptotic Kolmogorov quantile: 1.6276 at 1%, 1.3581 at 5%.
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

double proportion_stderr(double p, std::size_t m) {
  if (m == 0) throw DomainError("standard error needs m >= 1");
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(m));
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace faota
