#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "paritylab/data.hpp"

namespace parity {

/// Plain feed-forward network: ReLU hidden layers, single linear output,
/// trained by SGD on MSE. Inputs are expected in bipolar encoding (+-1).
class Mlp {
 public:
  /// hidden = sizes of the hidden layers (may be empty for a linear model).
  /// Weights start He-scaled Normal(0, 2/fan_in), biases at zero.
  Mlp(int input_dim, std::vector<int> hidden, std::uint64_t seed);

  /// Raw outputs for a batch (one row per sample).
  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

  /// One SGD step on the batch; returns the batch MSE before the update.
  double train_batch(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXd>& y, double lr);

  /// Fraction of rows whose thresholded output matches the 0/1 target.
  double accuracy(const Eigen::Ref<const Eigen::MatrixXd>& X,
                  const Eigen::Ref<const Eigen::VectorXd>& y,
                  double threshold = 0.5) const;

 private:
  std::vector<Eigen::MatrixXd> W_;  // layer weights, shape out x in
  std::vector<Eigen::VectorXd> b_;  // layer biases
};

/// Dense bipolar encoding of a binary batch: active bit -> -1, inactive -> +1.
Eigen::MatrixXd bipolar_from_bits(const SparseBatch& batch);

/// All 2^N inputs in bipolar encoding, row r encodes the bits of r. N <= 24.
Eigen::MatrixXd bipolar_table(int N);

/// Parity of every truth-table row over the oracle support (0/1 values).
Eigen::VectorXd parity_targets(const Eigen::Ref<const Eigen::VectorXi>& w_true);

}  // namespace parity
