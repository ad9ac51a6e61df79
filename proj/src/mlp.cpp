#include "paritylab/mlp.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "paritylab/rng.hpp"

namespace parity {

Mlp::Mlp(int input_dim, std::vector<int> hidden, std::uint64_t seed) {
  if (input_dim < 1) throw std::invalid_argument("Mlp: input_dim < 1");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("Mlp: hidden size < 1");
  }
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  Xoshiro256pp g = make_stream(seed, StreamTag::kWeightInit, 0xA11Cu);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    const double sd = std::sqrt(2.0 / static_cast<double>(in));
    Eigen::MatrixXd W(out, in);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) W(r, c) = sd * normal01(g);
    }
    W_.push_back(std::move(W));
    b_.push_back(Eigen::VectorXd::Zero(out));
  }
}

Eigen::VectorXd Mlp::predict(
    const Eigen::Ref<const Eigen::MatrixXd>& X) const {
  Eigen::MatrixXd A = X;
  for (std::size_t l = 0; l < W_.size(); ++l) {
    Eigen::MatrixXd Z =
        (A * W_[l].transpose()).rowwise() + b_[l].transpose();
    if (l + 1 < W_.size()) {
      A = Z.cwiseMax(0.0);  // ReLU on hidden layers only
    } else {
      A = std::move(Z);
    }
  }
  return A.col(0);
}

double Mlp::train_batch(const Eigen::Ref<const Eigen::MatrixXd>& X,
                        const Eigen::Ref<const Eigen::VectorXd>& y,
                        double lr) {
  if (X.rows() != y.size()) {
    throw std::invalid_argument("Mlp::train_batch: batch size mismatch");
  }
  const auto L = W_.size();
  const double M = static_cast<double>(X.rows());

  // Forward pass, keeping pre- and post-activation values per layer.
  std::vector<Eigen::MatrixXd> acts;  // acts[l] feeds layer l
  acts.reserve(L + 1);
  acts.push_back(X);
  std::vector<Eigen::MatrixXd> zs;
  zs.reserve(L);
  for (std::size_t l = 0; l < L; ++l) {
    zs.push_back((acts.back() * W_[l].transpose()).rowwise() +
                 b_[l].transpose());
    acts.push_back(l + 1 < L ? zs.back().cwiseMax(0.0) : zs.back());
  }

  const Eigen::VectorXd err = acts.back().col(0) - y;
  const double loss = err.squaredNorm() / M;

  // Backward pass: dZ holds dLoss/dZ_l.
  Eigen::MatrixXd dZ = (2.0 / M) * err;
  for (std::size_t il = 0; il < L; ++il) {
    const std::size_t l = L - 1 - il;
    const Eigen::MatrixXd dW = dZ.transpose() * acts[l];
    const Eigen::VectorXd db = dZ.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd dA = dZ * W_[l];
      dZ = dA.cwiseProduct((zs[l - 1].array() > 0.0).cast<double>().matrix());
    }
    W_[l] -= lr * dW;
    b_[l] -= lr * db;
  }
  return loss;
}

double Mlp::accuracy(const Eigen::Ref<const Eigen::MatrixXd>& X,
                     const Eigen::Ref<const Eigen::VectorXd>& y,
                     double threshold) const {
  const Eigen::VectorXd out = predict(X);
  long correct = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const int pred = out(i) > threshold ? 1 : 0;
    if (pred == (y(i) > 0.5 ? 1 : 0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(out.size());
}

Eigen::MatrixXd bipolar_from_bits(const SparseBatch& batch) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(batch.M, batch.N);
  for (int m = 0; m < batch.M; ++m) {
    for (std::int64_t p = batch.row_ptr[m]; p < batch.row_ptr[m + 1]; ++p) {
      X(m, batch.cols[p]) = -1.0;
    }
  }
  return X;
}

Eigen::MatrixXd bipolar_table(int N) {
  if (N < 1 || N > 24) {
    throw std::invalid_argument("bipolar_table: need 1 <= N <= 24");
  }
  const auto rows = std::int64_t{1} << N;
  Eigen::MatrixXd X(rows, N);
  for (std::int64_t r = 0; r < rows; ++r) {
    for (int i = 0; i < N; ++i) {
      X(r, i) = (r >> i) & 1 ? -1.0 : 1.0;
    }
  }
  return X;
}

Eigen::VectorXd parity_targets(
    const Eigen::Ref<const Eigen::VectorXi>& w_true) {
  const auto N = static_cast<int>(w_true.size());
  if (N < 1 || N > 24) {
    throw std::invalid_argument("parity_targets: need 1 <= N <= 24");
  }
  std::uint32_t support = 0;
  for (int i = 0; i < N; ++i) {
    if (w_true(i) != 0) support |= (1u << i);
  }
  const auto rows = std::int64_t{1} << N;
  Eigen::VectorXd y(rows);
  for (std::int64_t r = 0; r < rows; ++r) {
    y(r) = std::popcount(static_cast<std::uint32_t>(r) & support) & 1;
  }
  return y;
}

}  // namespace parity
