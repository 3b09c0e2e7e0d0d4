#pragma once

#include <cstdint>
#include <random>

namespace faota {

/// SplitMix64 finalizer. Used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `index` of `master`. Two-level keys such as
/// (round, client) are formed by nesting: derive_seed(derive_seed(m, t), k).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Where a stream came from, recorded in every emitted result.
struct SeedInfo {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;
  bool operator==(const SeedInfo&) const = default;
};

/// An explicit pseudo-random stream. Samplers take one by reference and are
/// otherwise pure, so a trial's output depends only on its stream.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t master, std::uint64_t stream = 0)
      : info_{master, stream}, engine_(derive_seed(master, stream)) {}

  /// Child stream keyed by `index`; does not advance this stream.
  RngStream split(std::uint64_t index) const {
    return RngStream(derive_seed(info_.master, info_.stream), index);
  }

  engine_type& engine() noexcept { return engine_; }
  const SeedInfo& info() const noexcept { return info_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

 private:
  SeedInfo info_;
  engine_type engine_;
};

}  // namespace faota
