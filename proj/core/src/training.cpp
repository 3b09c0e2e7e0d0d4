#include "faota/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "faota/curve.hpp"
#include "faota/errors.hpp"

namespace faota {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum StreamTag : std::uint64_t {
  kInitStream = 1,
  kPartitionStream = 2,
  kChannelStream = 3,
  kNoiseStream = 4,
  kClientStream = 5,
};

void require_finite(const Eigen::VectorXd& v, const std::string& what, std::size_t round) {
  if (!v.allFinite()) {
    std::ostringstream os;
    os << "training diverged: nonfinite " << what << " in round " << round;
    throw TrainingError(os.str());
  }
}

}  // namespace

void FlConfig::validate() const {
  if (clients < 1) throw DomainError("FL needs at least one client");
  if (rounds < 1) throw DomainError("FL needs at least one round");
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) {
    throw DomainError("FL learning rate must lie in (0, 1)");
  }
  if (batch_size < 1) throw DomainError("batch size must be positive");
  if (local_steps < 1) throw DomainError("local steps must be positive");
  for (auto h : hidden) {
    if (h == 0) throw DomainError("hidden layer widths must be positive");
  }
}

FlConfig FlConfig::full_scale() {
  FlConfig c;
  c.clients = 100;
  c.rounds = 100;
  c.hidden = {200};
  c.batch_size = 32;
  c.learning_rate = 0.01;
  return c;
}

std::vector<ClientState> partition_iid(const Dataset& data, std::size_t clients, RngStream& rng) {
  if (clients == 0) throw DomainError("partition needs at least one client");
  if (clients > data.size()) {
    throw DomainError("cannot partition " + std::to_string(data.size()) + " samples across " +
                      std::to_string(clients) + " clients");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng.engine());

  std::vector<ClientState> out(clients);
  const std::size_t base = data.size() / clients;
  const std::size_t extra = data.size() % clients;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < clients; ++k) {
    const std::size_t n = base + (k < extra ? 1 : 0);
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                 order.begin() + static_cast<std::ptrdiff_t>(pos + n));
    out[k].id = k;
    out[k].data = data.subset(idx);
    pos += n;
  }
  return out;
}

Eigen::VectorXd local_update(ClientState& client, const Eigen::VectorXd& global, const Mlp& model,
                             const LocalUpdateOptions& opts, RngStream& rng) {
  if (static_cast<std::size_t>(global.size()) != model.parameter_count()) {
    throw DimensionError("global model dimension does not match the network");
  }
  if (client.data.size() == 0) throw DomainError("client has no data");
  if (!(opts.learning_rate > 0.0)) throw DomainError("learning rate must be positive");

  Eigen::VectorXd w = global;
  Eigen::VectorXd grad;
  std::vector<std::size_t> order(client.data.size());
  const std::size_t batch = std::min(opts.batch_size, order.size());
  for (std::size_t step = 0; step < opts.steps; ++step) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `batch` entries become a uniform sample.
    for (std::size_t i = 0; i < batch; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng.engine())]);
    }
    const Dataset mb = client.data.subset({order.begin(), order.begin() + static_cast<std::ptrdiff_t>(batch)});
    model.loss_and_gradient(w, mb.features, mb.labels, grad);
    if (!grad.allFinite()) {
      std::ostringstream os;
      os << "nonfinite gradient on client " << client.id << " (|w| = " << w.norm() << ")";
      throw TrainingError(os.str());
    }
    if (opts.optimizer == LocalOptimizer::Sgd) {
      w -= opts.learning_rate * grad;
    } else {
      adam_step(w, grad, client.adam, opts.learning_rate, opts.adam);
    }
  }
  return w;
}

TrainingResult run_training(const FlConfig& fl, OtaConfig ota, const ChannelSpec& channel,
                            const Dataset& train, const Dataset& test,
                            const std::function<void(const RoundRecord&)>& on_round) {
  fl.validate();
  if (train.size() == 0 || test.size() == 0) throw DomainError("training needs train and test data");
  if (train.dims() != test.dims()) throw DimensionError("train/test feature widths differ");

  std::vector<std::size_t> sizes{train.dims()};
  sizes.insert(sizes.end(), fl.hidden.begin(), fl.hidden.end());
  sizes.push_back(static_cast<std::size_t>(std::max(train.n_classes, test.n_classes)));
  const Mlp model(sizes);
  ota.dimension = model.parameter_count();
  ota.validate();
  if (fl.mode == AggregationMode::Ota) validate(channel.dependence);

  RngStream init_rng(fl.seed, kInitStream);
  RngStream partition_rng(fl.seed, kPartitionStream);
  const RngStream channel_root(fl.seed, kChannelStream);
  const RngStream noise_root(fl.seed, kNoiseStream);
  const RngStream client_root(fl.seed, kClientStream);

  TrainingResult result;
  Eigen::VectorXd w = model.init_parameters(init_rng);
  auto clients = partition_iid(train, fl.clients, partition_rng);

  const LocalUpdateOptions opts{fl.optimizer, fl.learning_rate, fl.batch_size, fl.local_steps,
                                fl.adam};
  const auto d = static_cast<Eigen::Index>(model.parameter_count());

  for (std::size_t t = 1; t <= fl.rounds; ++t) {
    const auto start = std::chrono::steady_clock::now();
    RoundRecord rec;
    rec.round = t;

    std::vector<std::size_t> selected;
    EffectiveGains effective;
    if (fl.mode == AggregationMode::Ideal) {
      selected.resize(fl.clients);
      std::iota(selected.begin(), selected.end(), std::size_t{0});
    } else {
      RngStream ch = channel_root.split(t);
      effective = select_ports(sample_gains(channel.dependence, fl.clients, channel.n_ports, ch));
      selected = select_users(effective, ota);
    }

    if (selected.empty()) {
      rec.participants = 0;
      rec.mse = kNaN;
      rec.eta = kNaN;
    } else {
      const RngStream round_clients = client_root.split(t);
      Eigen::MatrixXd updates(static_cast<Eigen::Index>(selected.size()), d);
      for (std::size_t i = 0; i < selected.size(); ++i) {
        RngStream crng = round_clients.split(selected[i]);
        updates.row(static_cast<Eigen::Index>(i)) =
            local_update(clients[selected[i]], w, model, opts, crng).transpose();
      }
      rec.participants = selected.size();
      if (fl.mode == AggregationMode::Ideal) {
        w = updates.colwise().mean().transpose();
        rec.mse = 0.0;
        rec.eta = kNaN;
      } else {
        const auto outcome = zf_power_control(effective, selected, ota);
        // Shared scalar: largest update norm of the round, known to every client
        // and the AP, so normalized updates satisfy ||u_k|| <= 1.
        double scale = updates.rowwise().norm().maxCoeff();
        if (!(scale > 0.0)) scale = 1.0;
        RngStream noise = noise_root.split(t);
        w = scale * ota_aggregate(updates / scale, outcome, ota, noise);
        rec.mse = outcome.realized_mse;
        rec.eta = outcome.eta;
      }
      require_finite(w, "global model", t);
    }

    rec.train_loss = model.loss(w, train.features, train.labels);
    rec.test_accuracy = model.accuracy(w, test.features, test.labels);
    if (!std::isfinite(rec.train_loss)) {
      throw TrainingError("training diverged: nonfinite loss in round " + std::to_string(t));
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    result.records.push_back(rec);
    if (on_round) on_round(rec);
  }
  result.parameters = w;
  return result;
}

void write_round_csv_header(std::ostream& os) {
  os << "round,participants,mse,eta,train_loss,test_acc\n";
}

void write_round_csv(std::ostream& os, const RoundRecord& r) {
  os << r.round << ',' << r.participants << ',' << format_double(r.mse) << ','
     << format_double(r.eta) << ',' << format_double(r.train_loss) << ','
     << format_double(r.test_accuracy) << '\n';
}

void write_round_jsonl(std::ostream& os, const RoundRecord& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["participants"] = r.participants;
  j["mse"] = num(r.mse);
  j["eta"] = num(r.eta);
  j["train_loss"] = num(r.train_loss);
  j["test_acc"] = num(r.test_accuracy);
  os << j.dump() << '\n';
}

std::vector<RoundRecord> read_round_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty round record stream", 0);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "round,participants,mse,eta,train_loss,test_acc") {
    throw ParseError("unexpected round record header '" + line + "'", 0);
  }
  std::size_t offset = line.size() + 1;
  std::vector<RoundRecord> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      offset += 1;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw ParseError("round record needs 6 columns", offset);
    try {
      RoundRecord r;
      r.round = std::stoul(cells[0]);
      r.participants = std::stoul(cells[1]);
      r.mse = std::stod(cells[2]);
      r.eta = std::stod(cells[3]);
      r.train_loss = std::stod(cells[4]);
      r.test_accuracy = std::stod(cells[5]);
      out.push_back(r);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number in round record", offset);
    }
    offset += line.size() + 1;
  }
  return out;
}

}  // namespace faota
