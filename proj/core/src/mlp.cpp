#include "faota/mlp.hpp"

#include <cmath>
#include <sstream>

#include "faota/errors.hpp"

namespace faota {

using Eigen::Index;
using Eigen::MatrixXd;

struct Mlp::Forward {
  std::vector<MatrixXd> pre;   // Z_l, out_l x batch
  std::vector<MatrixXd> post;  // A_l; post[0] is the input transposed
  MatrixXd log_proba;          // classes x batch
};

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw DomainError("MLP needs at least an input and an output layer");
  for (auto s : sizes_) {
    if (s == 0) throw DomainError("MLP layer sizes must be positive");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(n_params_);
    n_params_ += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

Eigen::VectorXd Mlp::init_parameters(RngStream& rng) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Index>(n_params_));
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(sizes_[l] + sizes_[l + 1]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const auto n_weights = sizes_[l + 1] * sizes_[l];
    for (std::size_t i = 0; i < n_weights; ++i) {
      p(static_cast<Index>(offsets_[l] + i)) = dist(rng.engine());
    }
  }
  return p;
}

void Mlp::check(const Eigen::VectorXd& params, const RowMatrix& x) const {
  if (static_cast<std::size_t>(params.size()) != n_params_) {
    std::ostringstream os;
    os << "MLP parameter vector has length " << params.size() << ", expected " << n_params_;
    throw DimensionError(os.str());
  }
  if (static_cast<std::size_t>(x.cols()) != sizes_.front()) {
    throw DimensionError("MLP input width does not match the feature dimension");
  }
}

Mlp::Forward Mlp::forward(const Eigen::VectorXd& params, const RowMatrix& x) const {
  check(params, x);
  Forward f;
  f.post.emplace_back(x.transpose());
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto out = static_cast<Index>(sizes_[l + 1]);
    const auto in = static_cast<Index>(sizes_[l]);
    Eigen::Map<const MatrixXd> w(params.data() + offsets_[l], out, in);
    Eigen::Map<const Eigen::VectorXd> b(params.data() + offsets_[l] + out * in, out);
    MatrixXd z = w * f.post.back();
    z.colwise() += b;
    f.pre.push_back(z);
    if (l + 1 < layers) f.post.emplace_back(z.cwiseMax(0.0));
  }
  // Log-softmax per column.
  const MatrixXd& z = f.pre.back();
  f.log_proba.resize(z.rows(), z.cols());
  for (Index j = 0; j < z.cols(); ++j) {
    const double m = z.col(j).maxCoeff();
    const double lse = m + std::log((z.col(j).array() - m).exp().sum());
    f.log_proba.col(j) = z.col(j).array() - lse;
  }
  return f;
}

RowMatrix Mlp::predict_proba(const Eigen::VectorXd& params, const RowMatrix& x) const {
  return forward(params, x).log_proba.array().exp().matrix().transpose();
}

double Mlp::loss(const Eigen::VectorXd& params, const RowMatrix& x, const std::vector<int>& y) const {
  if (y.size() != static_cast<std::size_t>(x.rows())) throw DimensionError("label count mismatch");
  if (y.empty()) throw DomainError("loss over an empty batch");
  const auto f = forward(params, x);
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total -= f.log_proba(y[i], static_cast<Index>(i));
  return total / static_cast<double>(y.size());
}

double Mlp::loss_and_gradient(const Eigen::VectorXd& params, const RowMatrix& x,
                              const std::vector<int>& y, Eigen::VectorXd& grad) const {
  if (y.size() != static_cast<std::size_t>(x.rows())) throw DimensionError("label count mismatch");
  if (y.empty()) throw DomainError("gradient over an empty batch");
  const auto f = forward(params, x);
  const auto batch = static_cast<double>(y.size());

  double total = 0.0;
  MatrixXd delta = f.log_proba.array().exp();  // softmax - onehot, scaled by 1/B
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto col = static_cast<Index>(i);
    if (y[i] < 0 || static_cast<std::size_t>(y[i]) >= sizes_.back()) {
      throw DomainError("label outside the output layer range");
    }
    total -= f.log_proba(y[i], col);
    delta(y[i], col) -= 1.0;
  }
  delta /= batch;

  grad.setZero(static_cast<Index>(n_params_));
  for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
    const auto out = static_cast<Index>(sizes_[l + 1]);
    const auto in = static_cast<Index>(sizes_[l]);
    Eigen::Map<MatrixXd> gw(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets_[l] + out * in, out);
    gw.noalias() = delta * f.post[l].transpose();
    gb = delta.rowwise().sum();
    if (l > 0) {
      Eigen::Map<const MatrixXd> w(params.data() + offsets_[l], out, in);
      MatrixXd back = w.transpose() * delta;
      delta = back.array() * (f.pre[l - 1].array() > 0.0).cast<double>();
    }
  }
  return total / batch;
}

double Mlp::accuracy(const Eigen::VectorXd& params, const RowMatrix& x,
                     const std::vector<int>& y) const {
  if (y.size() != static_cast<std::size_t>(x.rows())) throw DimensionError("label count mismatch");
  if (y.empty()) return 0.0;
  const auto f = forward(params, x);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    Index best = 0;
    f.log_proba.col(static_cast<Index>(i)).maxCoeff(&best);
    if (best == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, double lr,
               const AdamHyper& hyper) {
  if (grad.size() != params.size()) throw DimensionError("Adam gradient length mismatch");
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = hyper.beta1 * state.m + (1.0 - hyper.beta1) * grad;
  state.v = hyper.beta2 * state.v + (1.0 - hyper.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + hyper.epsilon);
}

}  // namespace faota
