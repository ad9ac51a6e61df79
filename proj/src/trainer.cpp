#include "paritylab/trainer.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "paritylab/rng.hpp"

namespace parity {

double mse_loss(const Eigen::Ref<const Eigen::MatrixXd>& Y,
                const Eigen::Ref<const Eigen::MatrixXd>& Y_true) {
  if (Y.rows() != Y_true.rows() || Y.cols() != Y_true.cols()) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  return (Y - Y_true).squaredNorm() / static_cast<double>(Y.rows());
}

double mean_l1_distance(const Eigen::Ref<const Eigen::MatrixXd>& W,
                        const Eigen::Ref<const Eigen::MatrixXi>& oracle) {
  if (W.rows() != oracle.rows() || W.cols() != oracle.cols()) {
    throw std::invalid_argument("mean_l1_distance: shape mismatch");
  }
  return (W - oracle.cast<double>()).cwiseAbs().sum() /
         static_cast<double>(W.size());
}

namespace {

// Scratch space reused across rows/steps.
struct UnitBuffers {
  std::vector<double> a;    // factors 1 - 2 w_i over the active set
  std::vector<double> suf;  // suffix products of a
  Eigen::VectorXd accum;    // negative gradient accumulator (times M)
};

// One SGD step of one unit. Inactive bits contribute factor 1 to the product,
// so every row costs O(active bits). Returns the unit's batch loss before the
// update.
double step_unit_impl(Eigen::Ref<Eigen::VectorXd> w, const SparseBatch& batch,
                      const Eigen::Ref<const Eigen::VectorXi>& w_true,
                      double alpha, UnitBuffers& buf) {
  if (w.size() != batch.N || w_true.size() != batch.N) {
    throw std::invalid_argument("sgd_step_unit: shape mismatch");
  }
  const int M = batch.M;
  buf.accum.setZero(w.size());
  double sq = 0.0;
  for (int m = 0; m < M; ++m) {
    const std::int64_t begin = batch.row_ptr[m];
    const int n = static_cast<int>(batch.row_ptr[m + 1] - begin);
    if (n == 0) continue;  // product and oracle product are both 1
    buf.a.resize(n);
    buf.suf.resize(n);
    int ones = 0;
    for (int t = 0; t < n; ++t) {
      const int col = batch.cols[begin + t];
      buf.a[t] = 1.0 - 2.0 * w(col);
      ones += w_true(col);
    }
    const double pt = (ones & 1) ? -1.0 : 1.0;  // oracle parity, bipolar
    double acc = 1.0;
    for (int t = n - 1; t >= 0; --t) {
      buf.suf[t] = acc;
      acc *= buf.a[t];
    }
    const double err = acc - pt;  // product minus oracle product
    sq += err * err;
    double pre = 1.0;
    for (int t = 0; t < n; ++t) {
      const int col = batch.cols[begin + t];
      buf.accum(col) += pre * buf.suf[t] * err;
      pre *= buf.a[t];
    }
  }
  // Gradient is -(1/M) accum, hence the += in the update.
  w += (alpha / M) * buf.accum;
  return 0.25 * sq / M;
}

TraceRow make_row(long step, double l1, const FamilyMoments& fm, double loss) {
  TraceRow r;
  r.step = step;
  r.l1 = l1;
  r.mu0 = fm.mu0;
  r.sig0 = fm.sig0_sq;
  r.mu1 = fm.mu1;
  r.sig1 = fm.sig1_sq;
  r.loss = loss;
  return r;
}

void validate(const TrainConfig& cfg) {
  if (cfg.N < 1 || cfg.M < 1 || cfg.P < 1 || cfg.S < 1) {
    throw std::invalid_argument("train: need N, M, P, S >= 1");
  }
  if (cfg.alpha < 0.0) throw std::invalid_argument("train: alpha < 0");
  if (!(cfg.p_e >= 0.0 && cfg.p_e <= 1.0)) {
    throw std::invalid_argument("train: p_e outside [0,1]");
  }
  if (!(cfg.p_w >= 0.0 && cfg.p_w <= 1.0)) {
    throw std::invalid_argument("train: p_w outside [0,1]");
  }
  if (!(cfg.convergence_threshold > 0.0 && cfg.convergence_threshold < 1.0)) {
    throw std::invalid_argument("train: convergence_threshold outside (0,1)");
  }
  if (cfg.init_sigma_sq < 0.0) {
    throw std::invalid_argument("train: init_sigma_sq < 0");
  }
  if (cfg.log_every < 1) throw std::invalid_argument("train: log_every < 1");
}

}  // namespace

double sgd_step_unit(Eigen::Ref<Eigen::VectorXd> w, const SparseBatch& batch,
                     const Eigen::Ref<const Eigen::VectorXi>& w_true,
                     double alpha) {
  UnitBuffers buf;
  return step_unit_impl(w, batch, w_true, alpha, buf);
}

Eigen::MatrixXd sgd_step(const Eigen::Ref<const Eigen::MatrixXd>& W,
                         const SparseBatch& batch,
                         const Eigen::Ref<const Eigen::MatrixXi>& oracle,
                         double alpha) {
  if (W.rows() != oracle.rows() || W.cols() != oracle.cols()) {
    throw std::invalid_argument("sgd_step: shape mismatch");
  }
  Eigen::MatrixXd next = W;
  UnitBuffers buf;
  for (Eigen::Index p = 0; p < next.cols(); ++p) {
    auto col = next.col(p);
    step_unit_impl(col, batch, oracle.col(p), alpha, buf);
  }
  return next;
}

TrainTrace train(const TrainConfig& cfg) {
  validate(cfg);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double sd = std::sqrt(cfg.init_sigma_sq);

  Eigen::MatrixXd W(cfg.N, cfg.P);
  Eigen::MatrixXi oracle(cfg.N, cfg.P);
  for (int p = 0; p < cfg.P; ++p) {
    Xoshiro256pp gi = make_stream(cfg.seed, StreamTag::kWeightInit, p);
    for (int i = 0; i < cfg.N; ++i) {
      W(i, p) = cfg.init_mu + sd * normal01(gi);
    }
    Xoshiro256pp go = make_stream(cfg.seed, StreamTag::kOracle, p);
    oracle.col(p) = sample_oracle(cfg.N, 1, cfg.p_w, go).col(0);
  }

  std::vector<SparseBatch> fixed;
  if (cfg.fixed_dataset) {
    fixed.reserve(cfg.P);
    for (int p = 0; p < cfg.P; ++p) {
      Xoshiro256pp gb = make_stream(cfg.seed, StreamTag::kBatch, p, 0);
      fixed.push_back(sample_bernoulli_batch(cfg.N, cfg.M, cfg.p_e, gb));
    }
  }

  TrainTrace trace;
  trace.oracle = oracle;
  trace.initial_l1 = mean_l1_distance(W, oracle);
  trace.rows.push_back(
      make_row(0, trace.initial_l1, family_moments(W, oracle), nan));
  if (cfg.observer) cfg.observer(0, W);

  double l1 = trace.initial_l1;
  if (l1 < cfg.convergence_threshold) trace.convergence_step = 0;

  UnitBuffers buf;
  long k = 0;
  while (!trace.convergence_step && !trace.diverged && k < cfg.S) {
    ++k;
    double loss = 0.0;
    for (int p = 0; p < cfg.P; ++p) {
      if (cfg.fixed_dataset) {
        auto col = W.col(p);
        loss += step_unit_impl(col, fixed[p], oracle.col(p), cfg.alpha, buf);
      } else {
        Xoshiro256pp gb = make_stream(cfg.seed, StreamTag::kBatch, p, k);
        const SparseBatch batch =
            sample_bernoulli_batch(cfg.N, cfg.M, cfg.p_e, gb);
        auto col = W.col(p);
        loss += step_unit_impl(col, batch, oracle.col(p), cfg.alpha, buf);
      }
    }
    l1 = mean_l1_distance(W, oracle);
    if (l1 < cfg.convergence_threshold) trace.convergence_step = k;
    if (W.cwiseAbs().maxCoeff() > 1e6) trace.diverged = true;
    const bool log_now = (k % cfg.log_every == 0) || k == cfg.S ||
                         trace.convergence_step || trace.diverged;
    if (log_now) {
      trace.rows.push_back(make_row(k, l1, family_moments(W, oracle), loss));
    }
    if (cfg.observer) cfg.observer(k, W);
  }
  trace.steps_run = k;
  trace.final_l1 = l1;
  trace.final_W = std::move(W);
  return trace;
}

double truth_table_accuracy(const Eigen::Ref<const Eigen::VectorXd>& w,
                            const Eigen::Ref<const Eigen::VectorXi>& w_true,
                            double threshold) {
  const auto N = static_cast<int>(w.size());
  if (N < 1 || N > 24) {
    throw std::invalid_argument("truth_table_accuracy: need 1 <= N <= 24");
  }
  if (w_true.size() != N) {
    throw std::invalid_argument("truth_table_accuracy: length mismatch");
  }
  std::uint32_t support = 0;
  for (int i = 0; i < N; ++i) {
    if (w_true(i) != 0) support |= (1u << i);
  }
  const std::uint64_t table = std::uint64_t{1} << N;
  std::uint64_t correct = 0;
  for (std::uint64_t mask = 0; mask < table; ++mask) {
    double prod = 1.0;
    std::uint32_t rest = static_cast<std::uint32_t>(mask);
    while (rest != 0) {
      const int i = std::countr_zero(rest);
      prod *= 1.0 - 2.0 * w(i);
      rest &= rest - 1;
    }
    const double y = 0.5 * (1.0 - prod);
    const int pred = y > threshold ? 1 : 0;
    const int parity =
        std::popcount(static_cast<std::uint32_t>(mask) & support) & 1;
    if (pred == parity) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(table);
}

void write_trace_csv(const TrainTrace& trace, std::ostream& os) {
  os << std::setprecision(17);
  os << "step,l1,mu0,sig0,mu1,sig1,loss\n";
  for (const TraceRow& r : trace.rows) {
    os << r.step << ',' << r.l1 << ',' << r.mu0 << ',' << r.sig0 << ','
       << r.mu1 << ',' << r.sig1 << ',' << r.loss << '\n';
  }
}

}  // namespace parity
