#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "paritylab/dynamics.hpp"
#include "paritylab/trainer.hpp"

namespace parity {

// ---------------------------------------------------------------------------
// Hyperparameter sweeps.
// ---------------------------------------------------------------------------

/// One training run inside a sweep.
struct RunOutcome {
  double value = 0.0;  // swept coordinate (p_e or alpha)
  int replica = 0;
  bool converged = false;
  bool diverged = false;
  long steps = 0;  // steps to convergence, or steps run if not converged
  double initial_l1 = 0.0;
  double final_l1 = 0.0;
};

struct SweepResult {
  std::vector<double> grid;
  std::vector<RunOutcome> runs;
  std::optional<double> best;   // fastest fully-converging grid value
  std::optional<double> limit;  // smallest value past best where no replica
                                // converges within S steps
};

struct SweepConfig {
  int N = 0;
  int M = 100;
  int P = 10;      // scale as ~1000/N to keep the L1 metric self-averaging
  int S = 25000;
  double alpha = 0.1;  // fixed coordinate of a p_e sweep
  double p_e = 0.0;    // fixed coordinate of an alpha sweep; <=0 means 1/N
  double p_w = 0.5;
  std::uint64_t seed = 1;
  int replicas = 1;
  int threads = 1;
  std::vector<double> grid;  // swept values; empty selects the default grid
};

/// Log-spaced p_e grid over [0.3/N, min(15/N, 0.95)].
std::vector<double> default_pe_grid(int N, int points = 12);

/// Log-spaced alpha grid from alpha2/10 (alpha0/10 when alpha2 <= 0) to 4N.
std::vector<double> default_alpha_grid(int N, int points = 10);

/// Trains across the p_e grid. `best` is the fastest converging p_e; `limit`
/// is the smallest p_e whose runs all show less than 10% distance reduction.
SweepResult sweep_pe(const SweepConfig& cfg);

/// Trains across the alpha grid at fixed p_e. `limit` is the smallest alpha
/// that fails to converge within S.
SweepResult sweep_alpha(const SweepConfig& cfg);

/// Least-squares line through (log x, log y); slope_se is the standard error
/// of the slope.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LineFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

/// CSV export `value,replica,converged,diverged,steps,initial_l1,final_l1`.
void write_sweep_csv(const SweepResult& result, std::ostream& os);

// ---------------------------------------------------------------------------
// Mean-field recurrence versus SGD.
// ---------------------------------------------------------------------------

struct TheoryVsEmpiricalConfig {
  int N = 1000;
  int M = 100000;
  double alpha = 0.0;  // <=0 selects 0.9 * alpha2(N)
  int steps = 1000;
  std::uint64_t seed = 1;
};

struct TheoryVsEmpiricalReport {
  std::vector<double> mu_emp, mu_theory, sig_emp, sig_theory;
  double max_mu_dev = 0.0;
  double alpha = 0.0;
};

/// Runs single-unit SGD and the two-moment recurrence side by side from the
/// same measured initial moments; reports the family-0 trajectories and their
/// largest mean deviation.
TheoryVsEmpiricalReport run_theory_vs_empirical(
    const TheoryVsEmpiricalConfig& cfg);

void write_theory_csv(const TheoryVsEmpiricalReport& r, std::ostream& os);

// ---------------------------------------------------------------------------
// Gaussianity and family symmetry.
// ---------------------------------------------------------------------------

struct GaussianityConfig {
  int N = 10000;
  int M = 2000;
  double alpha = 4.0;
  int S = 5000;  // reaches the 1% convergence threshold at this alpha
  int snapshots = 10;
  double qq_threshold = 0.995;  // calibrated against true-normal baselines
  std::uint64_t seed = 1;
};

struct SnapshotStats {
  long step = 0;
  double qq0 = 0.0, qq1 = 0.0, qq_combined = 0.0;
  double mu0 = 0.0, sig0 = 0.0, mu1 = 0.0, sig1 = 0.0;
  double sym_residual = 0.0;  // |mu0 - (1 - mu1)|
  long n0 = 0, n1 = 0;
};

struct GaussianityReport {
  std::vector<SnapshotStats> snaps;
  double sym_band = 0.0;  // 5/sqrt(N/2)
  bool all_qq_ok = false;
  bool all_sym_ok = false;
};

GaussianityReport run_gaussianity(const GaussianityConfig& cfg);

void write_gaussianity_csv(const GaussianityReport& r, std::ostream& os);

// ---------------------------------------------------------------------------
// Oracle-proportion invariance.
// ---------------------------------------------------------------------------

struct PwInvarianceConfig {
  int N = 10000;
  int M = 1000;
  double alpha = 10.0;
  int S = 2000;
  int snapshots = 20;
  std::vector<double> pw_values = {0.25, 0.5, 0.75};
  std::uint64_t seed = 1;
};

struct PwInvarianceReport {
  std::vector<double> pw_values;
  std::vector<long> steps;                       // logged steps
  std::vector<std::vector<double>> mu0, mu1;     // [run][logged step]
  double max_dev = 0.0;  // max pairwise family-mean difference
  double band = 0.0;     // 5/sqrt(smallest family count)
  bool ok = false;
};

/// Identical runs (same seed, hence identical batches and init) with varying
/// oracle ones-proportion; family-moment trajectories should overlap.
PwInvarianceReport run_pw_invariance(const PwInvarianceConfig& cfg);

void write_pw_invariance_csv(const PwInvarianceReport& r, std::ostream& os);

// ---------------------------------------------------------------------------
// Generalization: product node versus MLP on the full truth table.
// ---------------------------------------------------------------------------

struct GeneralizationConfig {
  int N = 12;
  int M = 50;
  double p_e = 0.0;  // <=0 selects 1/N
  double p_w = 0.5;
  double alpha = 1.0;
  double mlp_lr = 0.05;
  std::vector<int> hidden = {128, 128, 32};
  int S = 1500;
  int val_every = 25;
  std::uint64_t seed = 1;
};

struct GeneralizationPoint {
  long step = 0;
  double coverage = 0.0;  // fraction of the 2^N table seen so far
  double prod_val = 0.0;  // product-node validation accuracy on full table
  double mlp_val = 0.0;
  double mlp_train = 0.0;  // MLP accuracy on the seen entries
};

struct GeneralizationReport {
  std::vector<GeneralizationPoint> points;
  std::optional<long> prod_val1_step;  // first step with product val == 1.0
  double coverage_at_val1 = 0.0;
  double mlp_val_at_val1 = 0.0;
};

/// Trains the product node and the MLP on identical batches and tracks
/// validation accuracy over the complete truth table against coverage.
GeneralizationReport run_generalization(const GeneralizationConfig& cfg);

void write_generalization_csv(const GeneralizationReport& r, std::ostream& os);

// ---------------------------------------------------------------------------
// Effective learning rate alpha * p_e.
// ---------------------------------------------------------------------------

struct EffectiveLrPair {
  int N = 0;
  double alpha = 0.0;
  double p_e = 0.0;
};

struct EffectiveLrConfig {
  std::vector<EffectiveLrPair> pairs;  // empty selects the default set
  int M = 1000;
  int P = 8;
  int S = 30000;
  double p_w = 0.5;
  std::uint64_t seed = 1;
};

struct EffectiveLrOutcome {
  EffectiveLrPair pair;
  double rate = 0.0;  // alpha * p_e
  bool converged = false;
  long steps = 0;
};

struct EffectiveLrReport {
  std::vector<EffectiveLrOutcome> outcomes;
  double worst_group_ratio = 0.0;  // max over rate groups of max/min steps
};

/// Matched alpha * p_e should give matched steps-to-convergence.
EffectiveLrReport run_effective_lr(const EffectiveLrConfig& cfg);

void write_effective_lr_csv(const EffectiveLrReport& r, std::ostream& os);

}  // namespace parity
