#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faota/channel.hpp"
#include "faota/dataset.hpp"
#include "faota/mlp.hpp"
#include "faota/ota.hpp"

namespace faota {

enum class LocalOptimizer { Adam, Sgd };
enum class AggregationMode {
  Ota,    // fluid-antenna channel, user selection, ZF scaling, receiver noise
  Ideal,  // noise-free aggregation of all K clients
};

/// Federated training configuration. Desk-scale defaults; full_scale() switches
/// to 100 clients, 100 rounds, 200 hidden units.
struct FlConfig {
  std::size_t clients = 10;
  std::size_t rounds = 30;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::size_t local_steps = 1;
  std::vector<std::size_t> hidden = {32};
  LocalOptimizer optimizer = LocalOptimizer::Adam;
  AdamHyper adam{};
  AggregationMode mode = AggregationMode::Ota;
  std::uint64_t seed = 1;

  void validate() const;
  static FlConfig full_scale();
};

/// Fluid-antenna channel seen by every client: N ports with the given dependence.
struct ChannelSpec {
  std::size_t n_ports = 10;
  DependenceSpec dependence = Independent{};
};

struct ClientState {
  std::size_t id = 0;
  Dataset data;
  AdamState adam;
};

struct RoundRecord {
  std::size_t round = 0;         // 1-based
  std::size_t participants = 0;  // 0 marks a skipped round
  double mse = 0.0;              // NaN when skipped
  double eta = 0.0;              // NaN when skipped or in ideal mode
  double train_loss = 0.0;
  double test_accuracy = 0.0;
  double wall_ms = 0.0;          // not serialized
};

/// Shuffled, disjoint partitions whose sizes differ by at most one.
std::vector<ClientState> partition_iid(const Dataset& data, std::size_t clients, RngStream& rng);

struct LocalUpdateOptions {
  LocalOptimizer optimizer = LocalOptimizer::Adam;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::size_t steps = 1;
  AdamHyper adam{};
};

/// Starts from `global`, takes `steps` mini-batch steps on the client's data and
/// returns the local model. Adam moments persist in `client`.
Eigen::VectorXd local_update(ClientState& client, const Eigen::VectorXd& global, const Mlp& model,
                             const LocalUpdateOptions& opts, RngStream& rng);

struct TrainingResult {
  std::vector<RoundRecord> records;
  Eigen::VectorXd parameters;
};

/// Federated averaging over the simulated fluid-antenna uplink.
///
/// Each round: draw port gains, pick the best port per user, select users meeting
/// the MSE target, run local updates on the selected clients, normalize updates by
/// the largest update norm of the round, aggregate over the air, then undo the
/// normalization. A round with no eligible users leaves the model unchanged.
/// `ota.dimension` is overwritten with the model's parameter count.
/// `on_round` (optional) sees each record as soon as it is produced.
TrainingResult run_training(const FlConfig& fl, OtaConfig ota, const ChannelSpec& channel,
                            const Dataset& train, const Dataset& test,
                            const std::function<void(const RoundRecord&)>& on_round = {});

/// CSV header: round,participants,mse,eta,train_loss,test_acc
void write_round_csv_header(std::ostream& os);
void write_round_csv(std::ostream& os, const RoundRecord& r);
/// One JSON object per line; NaN fields become null.
void write_round_jsonl(std::ostream& os, const RoundRecord& r);
/// Reads a stream produced by write_round_csv_header/write_round_csv.
std::vector<RoundRecord> read_round_csv(std::istream& in);

}  // namespace faota
