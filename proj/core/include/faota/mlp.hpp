#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "faota/dataset.hpp"
#include "faota/rng.hpp"

namespace faota {

/// Fully connected network: ReLU hidden layers, softmax output, cross-entropy loss.
///
/// Parameters live in one flat vector. Layer l contributes its weight matrix
/// (out_l x in_l, column-major) followed by its bias vector.
class Mlp {
 public:
  /// `layer_sizes` = {input, hidden..., classes}; at least two entries, all positive.
  explicit Mlp(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t parameter_count() const noexcept { return n_params_; }

  /// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
  Eigen::VectorXd init_parameters(RngStream& rng) const;

  /// Class probabilities, one row per sample.
  RowMatrix predict_proba(const Eigen::VectorXd& params, const RowMatrix& x) const;

  /// Mean cross-entropy over the rows of x.
  double loss(const Eigen::VectorXd& params, const RowMatrix& x, const std::vector<int>& y) const;

  /// Mean cross-entropy and its gradient by backpropagation.
  double loss_and_gradient(const Eigen::VectorXd& params, const RowMatrix& x,
                           const std::vector<int>& y, Eigen::VectorXd& grad) const;

  double accuracy(const Eigen::VectorXd& params, const RowMatrix& x, const std::vector<int>& y) const;

 private:
  struct Forward;
  Forward forward(const Eigen::VectorXd& params, const RowMatrix& x) const;
  void check(const Eigen::VectorXd& params, const RowMatrix& x) const;

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // start of each layer's weights
  std::size_t n_params_ = 0;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam step in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, AdamState& state, double lr,
               const AdamHyper& hyper = {});

}  // namespace faota
