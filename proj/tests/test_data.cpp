#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "paritylab/data.hpp"
#include "paritylab/rng.hpp"

using namespace parity;

TEST_CASE("bernoulli batches are reproducible from the seed") {
  Xoshiro256pp g1 = make_stream(31, StreamTag::kBatch, 0, 1);
  Xoshiro256pp g2 = make_stream(31, StreamTag::kBatch, 0, 1);
  const SparseBatch a = sample_bernoulli_batch(64, 50, 0.05, g1);
  const SparseBatch b = sample_bernoulli_batch(64, 50, 0.05, g2);
  CHECK(a.row_ptr == b.row_ptr);
  CHECK(a.cols == b.cols);

  Xoshiro256pp g3 = make_stream(31, StreamTag::kBatch, 0, 2);
  const SparseBatch c = sample_bernoulli_batch(64, 50, 0.05, g3);
  CHECK(a.cols != c.cols);  // different step, different batch
}

TEST_CASE("sparse rows are sorted, unique, in range") {
  Xoshiro256pp g = make_stream(32, StreamTag::kBatch, 0, 1);
  const SparseBatch batch = sample_bernoulli_batch(500, 200, 0.02, g);
  for (int m = 0; m < batch.M; ++m) {
    for (std::int64_t p = batch.row_ptr[m]; p < batch.row_ptr[m + 1]; ++p) {
      CHECK(batch.cols[p] >= 0);
      CHECK(batch.cols[p] < 500);
      if (p > batch.row_ptr[m]) CHECK(batch.cols[p] > batch.cols[p - 1]);
    }
  }
  CHECK(batch.nnz() == batch.row_ptr.back());
  CHECK(batch.dense().sum() == doctest::Approx(batch.nnz()));
}

TEST_CASE("activation counts match the bernoulli law on both paths") {
  // Sparse path: N p_e small.
  {
    Xoshiro256pp g = make_stream(33, StreamTag::kBatch, 0, 1);
    const SparseBatch batch = sample_bernoulli_batch(200, 2000, 0.03, g);
    const double trials = 200.0 * 2000.0;
    const double mean = trials * 0.03;
    const double sd = std::sqrt(trials * 0.03 * 0.97);
    CHECK(std::abs(batch.nnz() - mean) < 4.0 * sd);
  }
  // Dense path: p_e large.
  {
    Xoshiro256pp g = make_stream(34, StreamTag::kBatch, 0, 1);
    const SparseBatch batch = sample_bernoulli_batch(40, 4000, 0.5, g);
    const double trials = 40.0 * 4000.0;
    const double sd = std::sqrt(trials * 0.25);
    CHECK(std::abs(batch.nnz() - trials * 0.5) < 4.0 * sd);
  }
  // Degenerate probabilities.
  {
    Xoshiro256pp g = make_stream(35, StreamTag::kBatch, 0, 1);
    CHECK(sample_bernoulli_batch(30, 10, 0.0, g).nnz() == 0);
    CHECK(sample_bernoulli_batch(30, 10, 1.0, g).nnz() == 300);
  }
}

TEST_CASE("per-row activation count distribution matches the binomial pmf") {
  const int N = 100, M = 20000;
  const double pe = 0.01;
  Xoshiro256pp g = make_stream(36, StreamTag::kBatch, 0, 1);
  const SparseBatch batch = sample_bernoulli_batch(N, M, pe, g);
  std::vector<int> hist(N + 1, 0);
  for (int m = 0; m < M; ++m) ++hist[batch.row_size(m)];
  for (int q = 0; q <= 4; ++q) {
    const double p = active_bit_pmf(N, pe, q);
    const double sd = std::sqrt(M * p * (1.0 - p));
    CHECK(std::abs(hist[q] - M * p) < 4.0 * sd + 1.0);
  }
}

TEST_CASE("binomial pmf values") {
  CHECK(active_bit_pmf(100, 0.01, 1) ==
        doctest::Approx(0.36972963764972677).epsilon(1e-14));
  double total = 0.0;
  for (int q = 0; q <= 100; ++q) total += active_bit_pmf(100, 0.01, q);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // At p_e = 1/N the single-active-bit count is the most likely nonzero one.
  CHECK(active_bit_pmf(100, 0.01, 1) > active_bit_pmf(100, 0.01, 2));
  CHECK(active_bit_pmf(50, 0.0, 0) == 1.0);
  CHECK(active_bit_pmf(50, 0.0, 1) == 0.0);
  CHECK(active_bit_pmf(50, 1.0, 50) == 1.0);
  CHECK(active_bit_pmf(50, 1.0, 49) == 0.0);
}

TEST_CASE("one-hot sampling is uniform over coordinates") {
  const int N = 10, M = 20000;
  Xoshiro256pp g = make_stream(37, StreamTag::kOneHot, 0);
  const OneHotDataset ds = sample_one_hot_dataset(N, M, 2.0, g);
  std::vector<int> hist(N, 0);
  for (int k : ds.k) {
    REQUIRE(k >= 0);
    REQUIRE(k < N);
    ++hist[k];
  }
  const double mean = static_cast<double>(M) / N;
  const double sd = std::sqrt(M * (1.0 / N) * (1.0 - 1.0 / N));
  for (int i = 0; i < N; ++i) CHECK(std::abs(hist[i] - mean) < 4.0 * sd);
}

TEST_CASE("cyclic one-hot coverage and dense form") {
  const OneHotDataset ds = one_hot_cyclic(5, 12, 3.0);
  for (int m = 0; m < 12; ++m) CHECK(ds.k[m] == m % 5);
  const Eigen::MatrixXd Z = ds.z_dense();
  CHECK(Z.rows() == 12);
  CHECK(Z.cols() == 5);
  for (int m = 0; m < 12; ++m) {
    for (int i = 0; i < 5; ++i) {
      CHECK(Z(m, i) == (i == m % 5 ? 3.0 : 0.0));
    }
  }
}

TEST_CASE("oracle columns have exactly round(p_w N) active targets") {
  Xoshiro256pp g = make_stream(38, StreamTag::kOracle, 0);
  const Eigen::MatrixXi oracle = sample_oracle(11, 6, 0.5, g);
  CHECK(oracle.rows() == 11);
  CHECK(oracle.cols() == 6);
  for (int p = 0; p < 6; ++p) {
    CHECK(oracle.col(p).sum() == 6);  // round(0.5 * 11)
    for (int i = 0; i < 11; ++i) {
      CHECK((oracle(i, p) == 0 || oracle(i, p) == 1));
    }
  }
  Xoshiro256pp g2 = make_stream(38, StreamTag::kOracle, 1);
  CHECK(sample_oracle(8, 1, 0.0, g2).sum() == 0);
  CHECK(sample_oracle(8, 1, 1.0, g2).sum() == 8);
}

TEST_CASE("uniform_below stays in range and covers the range") {
  Xoshiro256pp g = make_stream(39, StreamTag::kGeneric, 0);
  std::vector<int> hist(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t v = uniform_below(g, 5);
    REQUIRE(v < 5);
    ++hist[static_cast<int>(v)];
  }
  const double sd = std::sqrt(5000 * 0.2 * 0.8);
  for (int c : hist) CHECK(std::abs(c - 1000.0) < 4.0 * sd);
}

TEST_CASE("batch CSV lists the active entries") {
  Xoshiro256pp g = make_stream(40, StreamTag::kBatch, 0, 1);
  const SparseBatch batch = sample_bernoulli_batch(20, 15, 0.2, g);
  std::ostringstream os;
  write_batch_csv(batch, os);
  const std::string text = os.str();
  CHECK(text.rfind("m,i,bit\n", 0) == 0);
  const long lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == batch.nnz() + 1);
}

TEST_CASE("invalid sampling arguments throw") {
  Xoshiro256pp g = make_stream(41, StreamTag::kGeneric, 0);
  CHECK_THROWS_AS(sample_bernoulli_batch(0, 5, 0.1, g), std::invalid_argument);
  CHECK_THROWS_AS(sample_bernoulli_batch(5, 0, 0.1, g), std::invalid_argument);
  CHECK_THROWS_AS(sample_bernoulli_batch(5, 5, -0.1, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_bernoulli_batch(5, 5, 1.1, g), std::invalid_argument);
  CHECK_THROWS_AS(active_bit_pmf(5, 0.5, -1), std::invalid_argument);
  CHECK_THROWS_AS(active_bit_pmf(5, 0.5, 6), std::invalid_argument);
}
