#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "paritylab/data.hpp"
#include "paritylab/gradients.hpp"
#include "paritylab/mlp.hpp"
#include "paritylab/rng.hpp"
#include "paritylab/trainer.hpp"

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;
using Eigen::VectorXi;
using namespace parity;

namespace {

SparseBatch single_row_batch(int N, std::vector<std::int32_t> active) {
  SparseBatch b;
  b.N = N;
  b.M = 1;
  b.p_e = 0.5;
  b.row_ptr = {0, static_cast<std::int64_t>(active.size())};
  b.cols = std::move(active);
  return b;
}

}  // namespace

TEST_CASE("single-step update worked example") {
  // One unit, one active bit in the support: a = 0, target parity -1,
  // error 1, so the weight moves up by exactly alpha.
  VectorXd w(1);
  w << 0.5;
  VectorXi wt(1);
  wt << 1;
  const SparseBatch batch = single_row_batch(1, {0});
  const double loss = sgd_step_unit(w, batch, wt, 0.1);
  CHECK(w(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(loss == doctest::Approx(0.25).epsilon(1e-15));

  // A row with no active bits carries no error and no gradient.
  VectorXd w2(3);
  w2 << 0.3, 0.7, 0.1;
  VectorXi wt2(3);
  wt2 << 1, 0, 1;
  const VectorXd before = w2;
  const double loss2 = sgd_step_unit(w2, single_row_batch(3, {}), wt2, 0.5);
  CHECK(loss2 == 0.0);
  CHECK((w2 - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit loss equals the xor batch risk") {
  Xoshiro256pp g = make_stream(71, StreamTag::kBatch, 0, 1);
  const SparseBatch batch = sample_bernoulli_batch(12, 40, 0.15, g);
  Xoshiro256pp g2 = make_stream(71, StreamTag::kGeneric, 0);
  VectorXd w(12);
  VectorXi wt(12);
  for (int i = 0; i < 12; ++i) {
    w(i) = uniform01(g2);
    wt(i) = uniform01(g2) < 0.5 ? 1 : 0;
  }
  VectorXd w_copy = w;
  const double loss = sgd_step_unit(w_copy, batch, wt, 0.3);
  const MatrixXd B = batch.dense();
  CHECK(loss == doctest::Approx(xor_risk(B, w, wt.cast<double>().eval()))
                    .epsilon(1e-12));
  // And the step itself is gradient descent on that risk.
  const VectorXd grad = xor_grad(B, w, wt.cast<double>().eval());
  CHECK((w_copy - (w - 0.3 * grad)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("multi-unit step matches per-unit steps") {
  Xoshiro256pp g = make_stream(72, StreamTag::kBatch, 0, 1);
  const SparseBatch batch = sample_bernoulli_batch(9, 30, 0.2, g);
  Xoshiro256pp g2 = make_stream(72, StreamTag::kGeneric, 0);
  MatrixXd W(9, 3);
  MatrixXi oracle(9, 3);
  for (int p = 0; p < 3; ++p) {
    for (int i = 0; i < 9; ++i) {
      W(i, p) = uniform01(g2);
      oracle(i, p) = uniform01(g2) < 0.5 ? 1 : 0;
    }
  }
  const MatrixXd stepped = sgd_step(W, batch, oracle, 0.4);
  for (int p = 0; p < 3; ++p) {
    VectorXd w = W.col(p);
    sgd_step_unit(w, batch, oracle.col(p).eval(), 0.4);
    CHECK((stepped.col(p) - w).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("training runs are reproducible and unit streams ignore P") {
  TrainConfig cfg;
  cfg.N = 20;
  cfg.P = 1;
  cfg.M = 50;
  cfg.p_e = 0.1;
  cfg.alpha = 0.5;
  cfg.S = 40;
  cfg.seed = 7;
  cfg.log_every = 10;
  const TrainTrace t1 = train(cfg);
  const TrainTrace t2 = train(cfg);
  CHECK((t1.final_W - t2.final_W).cwiseAbs().maxCoeff() == 0.0);
  CHECK(t1.rows.size() == t2.rows.size());

  // Adding more units must not change unit 0's trajectory.
  TrainConfig wide = cfg;
  wide.P = 4;
  const TrainTrace t3 = train(wide);
  CHECK((t3.final_W.col(0) - t1.final_W.col(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t3.oracle.col(0).array() == t1.oracle.col(0).array()).all());
}

TEST_CASE("zero learning rate freezes the mean distance") {
  TrainConfig cfg;
  cfg.N = 15;
  cfg.M = 20;
  cfg.p_e = 0.2;
  cfg.alpha = 0.0;
  cfg.S = 25;
  cfg.seed = 3;
  const TrainTrace trace = train(cfg);
  REQUIRE(!trace.rows.empty());
  CHECK(trace.rows.front().step == 0);
  CHECK(std::isnan(trace.rows.front().loss));
  for (const TraceRow& r : trace.rows) {
    CHECK(r.l1 == doctest::Approx(trace.initial_l1).epsilon(1e-15));
  }
  CHECK_FALSE(trace.convergence_step.has_value());
  CHECK(trace.steps_run == 25);
}

TEST_CASE("fixed dataset mode reuses the first batch") {
  TrainConfig cfg;
  cfg.N = 10;
  cfg.M = 30;
  cfg.p_e = 0.15;
  cfg.alpha = 0.3;
  cfg.S = 30;
  cfg.seed = 11;
  cfg.fixed_dataset = true;
  const TrainTrace fixed1 = train(cfg);
  const TrainTrace fixed2 = train(cfg);
  CHECK((fixed1.final_W - fixed2.final_W).cwiseAbs().maxCoeff() == 0.0);
  cfg.fixed_dataset = false;
  const TrainTrace fresh = train(cfg);
  CHECK((fixed1.final_W - fresh.final_W).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("an easy instance converges and logs the convergence step") {
  TrainConfig cfg;
  cfg.N = 10;
  cfg.P = 2;
  cfg.M = 500;
  cfg.p_e = 0.1;
  cfg.alpha = 1.0;
  cfg.S = 5000;
  cfg.seed = 5;
  cfg.log_every = 50;
  const TrainTrace trace = train(cfg);
  REQUIRE(trace.convergence_step.has_value());
  CHECK(trace.final_l1 < cfg.convergence_threshold);
  CHECK_FALSE(trace.diverged);
  CHECK(trace.rows.back().step == *trace.convergence_step);
  CHECK(trace.steps_run == *trace.convergence_step);
  // Family means end near the binary targets: family 1 near 1, family 0
  // near 0.
  CHECK(trace.rows.back().mu1 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(trace.rows.back().mu0 == doctest::Approx(0.0).epsilon(0.05));
}

TEST_CASE("runaway learning rates are reported as divergence") {
  TrainConfig cfg;
  cfg.N = 10;
  cfg.M = 20;
  cfg.p_e = 0.5;
  cfg.alpha = 1e6;
  cfg.S = 500;
  cfg.seed = 2;
  const TrainTrace trace = train(cfg);
  CHECK(trace.diverged);
  CHECK_FALSE(trace.convergence_step.has_value());
  CHECK(trace.steps_run < 500);
}

TEST_CASE("observer fires at step zero and after every step") {
  TrainConfig cfg;
  cfg.N = 8;
  cfg.M = 10;
  cfg.p_e = 0.2;
  cfg.alpha = 0.0;
  cfg.S = 17;
  cfg.seed = 13;
  cfg.log_every = 5;
  long calls = 0;
  long last_step = -1;
  cfg.observer = [&](long step, const MatrixXd& W) {
    CHECK(step == last_step + 1);
    CHECK(W.rows() == 8);
    last_step = step;
    ++calls;
  };
  train(cfg);
  CHECK(calls == 18);
  CHECK(last_step == 17);
}

TEST_CASE("loss and distance helpers") {
  MatrixXd Y(2, 1), Yt(2, 1);
  Y << 1, 2;
  Yt << 0, 0;
  CHECK(mse_loss(Y, Yt) == doctest::Approx(2.5).epsilon(1e-15));

  MatrixXd W(2, 2);
  W << 0.1, 0.9, 0.4, 0.5;
  MatrixXi oracle(2, 2);
  oracle << 0, 1, 1, 0;
  // |0.1-0| + |0.4-1| + |0.9-1| + |0.5-0| = 1.3 over 4 entries
  CHECK(mean_l1_distance(W, oracle) == doctest::Approx(0.325).epsilon(1e-15));
}

TEST_CASE("truth-table accuracy on exact, flipped, and invalid inputs") {
  VectorXi wt(6);
  wt << 1, 1, 0, 1, 0, 0;
  CHECK(truth_table_accuracy(wt.cast<double>(), wt) == 1.0);
  VectorXd flipped = wt.cast<double>();
  flipped(4) = 1.0;  // extra bit outside the support
  CHECK(truth_table_accuracy(flipped, wt) == doctest::Approx(0.5));
  VectorXd missing = wt.cast<double>();
  missing(0) = 0.0;  // dropped support bit
  CHECK(truth_table_accuracy(missing, wt) == doctest::Approx(0.5));
  // The all-half weight vector outputs exactly 1/2 everywhere, which the
  // threshold maps to prediction 0: accuracy is the even-parity fraction.
  CHECK(truth_table_accuracy(VectorXd::Constant(6, 0.5), wt) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(truth_table_accuracy(VectorXd::Zero(25), VectorXi::Zero(25)),
                  std::invalid_argument);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.N = 5;
  cfg.M = 5;
  cfg.p_e = 0.5;
  cfg.alpha = 0.1;
  cfg.S = 5;
  TrainConfig bad = cfg;
  bad.N = 0;
  CHECK_THROWS_AS(train(bad), std::invalid_argument);
  bad = cfg;
  bad.p_e = 1.5;
  CHECK_THROWS_AS(train(bad), std::invalid_argument);
  bad = cfg;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(train(bad), std::invalid_argument);
  bad = cfg;
  bad.convergence_threshold = 0.0;
  CHECK_THROWS_AS(train(bad), std::invalid_argument);
  bad = cfg;
  bad.log_every = 0;
  CHECK_THROWS_AS(train(bad), std::invalid_argument);
}

TEST_CASE("trace CSV header and row count") {
  TrainConfig cfg;
  cfg.N = 6;
  cfg.M = 10;
  cfg.p_e = 0.3;
  cfg.alpha = 0.0;
  cfg.S = 10;
  cfg.seed = 1;
  cfg.log_every = 2;
  const TrainTrace trace = train(cfg);
  std::ostringstream os;
  write_trace_csv(trace, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("step,l1,mu0,sig0,mu1,sig1,loss\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(trace.rows.size()) + 1);
  CHECK(trace.rows.size() == 6);  // steps 0,2,4,6,8,10
}

TEST_CASE("bipolar encodings") {
  SparseBatch batch;
  batch.N = 4;
  batch.M = 2;
  batch.p_e = 0.5;
  batch.row_ptr = {0, 2, 3};
  batch.cols = {0, 2, 3};
  const MatrixXd X = bipolar_from_bits(batch);
  MatrixXd want(2, 4);
  want << -1, 1, -1, 1, 1, 1, 1, -1;
  CHECK((X - want).cwiseAbs().maxCoeff() == 0.0);

  const MatrixXd table = bipolar_table(3);
  CHECK(table.rows() == 8);
  CHECK(table(0, 0) == 1.0);   // row 0: no bits set
  CHECK(table(5, 0) == -1.0);  // row 5 = 101b: bits 0 and 2
  CHECK(table(5, 1) == 1.0);
  CHECK(table(5, 2) == -1.0);

  VectorXi wt(3);
  wt << 1, 0, 1;
  const VectorXd targets = parity_targets(wt);
  CHECK(targets.size() == 8);
  CHECK(targets(0) == 0.0);
  CHECK(targets(1) == 1.0);  // bit 0 set
  CHECK(targets(5) == 0.0);  // bits 0 and 2 set, even parity over support
}

TEST_CASE("a small mlp fits the parity table") {
  const int N = 3;
  const MatrixXd X = bipolar_table(N);
  VectorXi wt(N);
  wt << 1, 1, 0;
  const VectorXd y = parity_targets(wt);
  Mlp mlp(N, {16, 8}, 42);
  const double loss0 = mlp.train_batch(X, y, 0.05);
  double loss = loss0;
  for (int k = 0; k < 4000; ++k) loss = mlp.train_batch(X, y, 0.05);
  CHECK(loss < 0.1 * loss0);
  CHECK(mlp.accuracy(X, y) >= 0.9);
  const VectorXd out = mlp.predict(X);
  CHECK(out.size() == 8);
}
