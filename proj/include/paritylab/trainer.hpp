#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "paritylab/data.hpp"
#include "paritylab/stats.hpp"

namespace parity {

/// Configuration of one training run of P parallel parity units.
struct TrainConfig {
  int N = 0;
  int P = 1;
  int M = 0;
  double p_e = 0.0;
  double p_w = 0.5;
  double alpha = 0.0;
  int S = 1;  // max steps
  std::uint64_t seed = 0;
  double convergence_threshold = 0.01;  // mean L1 per weight
  double init_mu = 0.5;
  double init_sigma_sq = 0.25;
  bool fixed_dataset = false;  // reuse the step-0 batches every step
  int log_every = 1;           // trace row every this many steps
  // Optional hook, called with (step, W) at step 0 and after every step.
  std::function<void(long, const Eigen::MatrixXd&)> observer;
};

/// One logged step: state metrics after `step` updates; `loss` is the batch
/// loss observed during that step (before the update), NaN at step 0.
struct TraceRow {
  long step = 0;
  double l1 = 0.0;
  double mu0 = 0.0;
  double sig0 = 0.0;
  double mu1 = 0.0;
  double sig1 = 0.0;
  double loss = 0.0;
};

/// Full record of a training run.
struct TrainTrace {
  std::vector<TraceRow> rows;
  std::optional<long> convergence_step;
  bool diverged = false;  // some |w| exceeded 1e6; run flagged failed
  long steps_run = 0;
  double initial_l1 = 0.0;
  double final_l1 = 0.0;
  Eigen::MatrixXd final_W;
  Eigen::MatrixXi oracle;
};

/// Batch loss (1/M) sum_{m,p} (y - y_true)^2 — normalized by sample count
/// only, not by the number of units.
double mse_loss(const Eigen::Ref<const Eigen::MatrixXd>& Y,
                const Eigen::Ref<const Eigen::MatrixXd>& Y_true);

/// Mean absolute weight error (1/(NP)) sum |W - oracle|.
double mean_l1_distance(const Eigen::Ref<const Eigen::MatrixXd>& W,
                        const Eigen::Ref<const Eigen::MatrixXi>& oracle);

/// One SGD step of every unit on a shared batch; returns the updated weights.
/// Gradient per unit is the analytic parity-unit gradient on the batch.
Eigen::MatrixXd sgd_step(const Eigen::Ref<const Eigen::MatrixXd>& W,
                         const SparseBatch& batch,
                         const Eigen::Ref<const Eigen::MatrixXi>& oracle,
                         double alpha);

/// In-place SGD step of a single unit; returns that unit's batch loss
/// (evaluated before the update).
double sgd_step_unit(Eigen::Ref<Eigen::VectorXd> w, const SparseBatch& batch,
                     const Eigen::Ref<const Eigen::VectorXi>& w_true,
                     double alpha);

/// Full training run. Weights start i.i.d. Normal(init_mu, init_sigma_sq);
/// each unit consumes its own (seed, purpose, unit, step) random streams, so
/// per-unit trajectories do not depend on P or on thread scheduling. A fresh
/// batch is drawn per unit per step unless fixed_dataset is set. Stops early
/// on convergence (mean L1 below threshold) or divergence (|w| > 1e6).
TrainTrace train(const TrainConfig& cfg);

/// Fraction of all 2^N inputs where thresholded xor_forward(w, b) equals the
/// oracle parity. Requires N <= 24.
double truth_table_accuracy(const Eigen::Ref<const Eigen::VectorXd>& w,
                            const Eigen::Ref<const Eigen::VectorXi>& w_true,
                            double threshold = 0.5);

/// CSV export `step,l1,mu0,sig0,mu1,sig1,loss`.
void write_trace_csv(const TrainTrace& trace, std::ostream& os);

}  // namespace parity
