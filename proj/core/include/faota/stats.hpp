#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace faota {

/// Kendall's tau-a in O(n log n) (Knight's merge-sort inversion count).
/// Pairs tied in either coordinate count as neither concordant nor discordant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// Two-sided Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Asymptotic critical value of the one-sample KS statistic at level `alpha`,
/// sqrt(-ln(alpha/2)/2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha = 0.01);

/// Monte Carlo standard error of a proportion, sqrt(p(1-p)/m).
double proportion_stderr(double p, std::size_t m);

/// 0 means "use hardware concurrency".
unsigned resolve_threads(unsigned requested);

/// Runs fn(trial, acc) for trial = 0..trials-1 over contiguous chunks, one
/// accumulator per worker, and returns the accumulators in chunk order. Results are
/// independent of the thread count as long as fn depends only on the trial index
/// and the reduction over accumulators is order-insensitive.
template <class Acc, class Fn>
std::vector<Acc> parallel_trials(std::size_t trials, unsigned threads, const Acc& init, Fn fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), trials));
  std::vector<Acc> accs(workers, init);
  auto run_chunk = [&](std::size_t w) {
    const std::size_t lo = trials * w / workers;
    const std::size_t hi = trials * (w + 1) / workers;
    for (std::size_t t = lo; t < hi; ++t) fn(t, accs[w]);
  };
  if (workers == 1) {
    run_chunk(0);
    return accs;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_chunk, w);
  run_chunk(0);
  pool.clear();  // joins
  return accs;
}

}  // namespace faota
