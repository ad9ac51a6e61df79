#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "paritylab/rng.hpp"

namespace parity {

/// Binary M x N batch with i.i.d. Bernoulli(p_e) entries, stored sparsely:
/// cols[row_ptr[m] .. row_ptr[m+1]) are the active column indices of row m,
/// in ascending order.
struct SparseBatch {
  int N = 0;
  int M = 0;
  double p_e = 0.0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> cols;

  std::int64_t nnz() const { return static_cast<std::int64_t>(cols.size()); }
  int row_size(int m) const {
    return static_cast<int>(row_ptr[m + 1] - row_ptr[m]);
  }
  /// Materialize as a dense 0/1 matrix (tests and small cases only).
  Eigen::MatrixXd dense() const;
};

/// One-hot z-dataset: row m equals v * e^(k_m).
struct OneHotDataset {
  int N = 0;
  int M = 0;
  double v = 0.0;
  std::vector<std::int32_t> k;

  Eigen::MatrixXd z_dense() const;
};

/// Uniform integer in [0, bound) via the multiply-shift reduction
/// (bias ~ bound/2^64, negligible for the sizes used here).
std::uint64_t uniform_below(Xoshiro256pp& g, std::uint64_t bound);

/// i.i.d. Bernoulli(p_e) bits. Sparse rows are drawn as a Binomial(N, p_e)
/// count followed by a uniform distinct-index subset, which yields exactly
/// the same distribution in O(N p_e) per row; dense rows fall back to a
/// direct per-entry scan.
SparseBatch sample_bernoulli_batch(int N, int M, double p_e, Xoshiro256pp& g);

/// Rows v * e^(k_m) with k_m uniform over {0..N-1}.
OneHotDataset sample_one_hot_dataset(int N, int M, double v, Xoshiro256pp& g);

/// Rows v * e^(k_m) with k_m = m mod N (deterministic full coverage when
/// M is a multiple of N).
OneHotDataset one_hot_cyclic(int N, int M, double v);

/// Binary N x P target matrix with exactly round(p_w * N) ones per column at
/// uniformly shuffled positions.
Eigen::MatrixXi sample_oracle(int N, int P, double p_w, Xoshiro256pp& g);

/// Binomial pmf: P{q of N bits active} = C(N,q) p_e^q (1-p_e)^(N-q).
double active_bit_pmf(int N, double p_e, int q);

/// Debug CSV dump with header `m,i,bit`; lists active entries only
/// (absent (m,i) pairs are zero).
void write_batch_csv(const SparseBatch& batch, std::ostream& os);

}  // namespace parity
