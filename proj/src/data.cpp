#include "paritylab/data.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace parity {

Eigen::MatrixXd SparseBatch::dense() const {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(M, N);
  for (int m = 0; m < M; ++m) {
    for (std::int64_t p = row_ptr[m]; p < row_ptr[m + 1]; ++p) {
      X(m, cols[p]) = 1.0;
    }
  }
  return X;
}

Eigen::MatrixXd OneHotDataset::z_dense() const {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(M, N);
  for (int m = 0; m < M; ++m) Z(m, k[m]) = v;
  return Z;
}

std::uint64_t uniform_below(Xoshiro256pp& g, std::uint64_t bound) {
  using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(g()) * bound) >> 64);
}

namespace {

// Inverse-CDF Binomial(n, p) sampler; used only where n*p is small, so the
// CDF walk is short and (1-p)^n stays far from underflow.
int sample_binomial_small_mean(Xoshiro256pp& g, int n, double p) {
  const double u = uniform01(g);
  const double r = p / (1.0 - p);
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
  double cdf = pmf;
  int q = 0;
  while (u > cdf && q < n) {
    pmf *= r * static_cast<double>(n - q) / static_cast<double>(q + 1);
    ++q;
    cdf += pmf;
  }
  return q;
}

// Floyd's algorithm: uniform subset of `count` distinct values in {0..n-1}.
void sample_distinct(Xoshiro256pp& g, int n, int count,
                     std::vector<std::int32_t>& out) {
  std::unordered_set<std::int32_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count) * 2);
  for (int j = n - count; j < n; ++j) {
    const auto t =
        static_cast<std::int32_t>(uniform_below(g, static_cast<std::uint64_t>(j) + 1));
    if (!chosen.insert(t).second) chosen.insert(static_cast<std::int32_t>(j));
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
}

}  // namespace

SparseBatch sample_bernoulli_batch(int N, int M, double p_e, Xoshiro256pp& g) {
  if (N < 1 || M < 1) {
    throw std::invalid_argument("sample_bernoulli_batch: need N, M >= 1");
  }
  if (!(p_e >= 0.0 && p_e <= 1.0)) {
    throw std::invalid_argument("sample_bernoulli_batch: p_e outside [0,1]");
  }
  SparseBatch batch;
  batch.N = N;
  batch.M = M;
  batch.p_e = p_e;
  batch.row_ptr.resize(static_cast<std::size_t>(M) + 1);
  batch.row_ptr[0] = 0;

  const bool sparse_path = p_e < 0.25 && static_cast<double>(N) * p_e <= 50.0;
  std::vector<std::int32_t> row;
  for (int m = 0; m < M; ++m) {
    row.clear();
    if (sparse_path) {
      const int n_active = sample_binomial_small_mean(g, N, p_e);
      if (n_active > 0) sample_distinct(g, N, n_active, row);
    } else {
      for (int i = 0; i < N; ++i) {
        if (uniform01(g) < p_e) row.push_back(i);
      }
    }
    batch.cols.insert(batch.cols.end(), row.begin(), row.end());
    batch.row_ptr[m + 1] = static_cast<std::int64_t>(batch.cols.size());
  }
  return batch;
}

OneHotDataset sample_one_hot_dataset(int N, int M, double v, Xoshiro256pp& g) {
  if (N < 1 || M < 1) {
    throw std::invalid_argument("sample_one_hot_dataset: need N, M >= 1");
  }
  OneHotDataset ds;
  ds.N = N;
  ds.M = M;
  ds.v = v;
  ds.k.resize(M);
  for (int m = 0; m < M; ++m) {
    ds.k[m] = static_cast<std::int32_t>(
        uniform_below(g, static_cast<std::uint64_t>(N)));
  }
  return ds;
}

OneHotDataset one_hot_cyclic(int N, int M, double v) {
  if (N < 1 || M < 1) {
    throw std::invalid_argument("one_hot_cyclic: need N, M >= 1");
  }
  OneHotDataset ds;
  ds.N = N;
  ds.M = M;
  ds.v = v;
  ds.k.resize(M);
  for (int m = 0; m < M; ++m) ds.k[m] = static_cast<std::int32_t>(m % N);
  return ds;
}

Eigen::MatrixXi sample_oracle(int N, int P, double p_w, Xoshiro256pp& g) {
  if (N < 1 || P < 1) {
    throw std::invalid_argument("sample_oracle: need N, P >= 1");
  }
  if (!(p_w >= 0.0 && p_w <= 1.0)) {
    throw std::invalid_argument("sample_oracle: p_w outside [0,1]");
  }
  const int count = static_cast<int>(std::llround(p_w * N));
  Eigen::MatrixXi W = Eigen::MatrixXi::Zero(N, P);
  std::vector<std::int32_t> idx(N);
  for (int p = 0; p < P; ++p) {
    for (int i = 0; i < N; ++i) idx[i] = i;
    // Partial Fisher-Yates: the first `count` slots become a uniform sample.
    for (int i = 0; i < count; ++i) {
      const auto j =
          i + static_cast<int>(uniform_below(g, static_cast<std::uint64_t>(N - i)));
      std::swap(idx[i], idx[j]);
      W(idx[i], p) = 1;
    }
  }
  return W;
}

double active_bit_pmf(int N, double p_e, int q) {
  if (N < 1) throw std::invalid_argument("active_bit_pmf: need N >= 1");
  if (q < 0 || q > N) {
    throw std::invalid_argument("active_bit_pmf: q outside [0,N]");
  }
  if (!(p_e >= 0.0 && p_e <= 1.0)) {
    throw std::invalid_argument("active_bit_pmf: p_e outside [0,1]");
  }
  if (p_e == 0.0) return q == 0 ? 1.0 : 0.0;
  if (p_e == 1.0) return q == N ? 1.0 : 0.0;
  const double log_choose = std::lgamma(N + 1.0) - std::lgamma(q + 1.0) -
                            std::lgamma(N - q + 1.0);
  return std::exp(log_choose + q * std::log(p_e) +
                  (N - q) * std::log1p(-p_e));
}

void write_batch_csv(const SparseBatch& batch, std::ostream& os) {
  os << "m,i,bit\n";
  for (int m = 0; m < batch.M; ++m) {
    for (std::int64_t p = batch.row_ptr[m]; p < batch.row_ptr[m + 1]; ++p) {
      os << m << ',' << batch.cols[p] << ",1\n";
    }
  }
}

}  // namespace parity
