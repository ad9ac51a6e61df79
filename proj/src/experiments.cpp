#include "paritylab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "paritylab/mlp.hpp"
#include "paritylab/rng.hpp"

namespace parity {

namespace {

std::uint64_t replica_seed(std::uint64_t master, int replica) {
  return hash_absorb(mix64(master), static_cast<std::uint64_t>(replica));
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0 && hi > lo) || points < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi, points >= 2");
  }
  std::vector<double> g(points);
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo * std::exp(step * i);
  return g;
}

void parallel_for(int jobs, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || jobs <= 1) {
    for (int j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, jobs);
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int j = next++; j < jobs; j = next++) fn(j);
    });
  }
  for (auto& th : pool) th.join();
}

enum class SweepKind { kPe, kAlpha };

SweepResult run_sweep(const SweepConfig& cfg, SweepKind kind) {
  if (cfg.N < 1) throw std::invalid_argument("sweep: need N >= 1");
  if (cfg.replicas < 1) throw std::invalid_argument("sweep: replicas >= 1");
  SweepResult result;
  result.grid = cfg.grid.empty()
                    ? (kind == SweepKind::kPe ? default_pe_grid(cfg.N)
                                              : default_alpha_grid(cfg.N))
                    : cfg.grid;
  std::sort(result.grid.begin(), result.grid.end());
  const int points = static_cast<int>(result.grid.size());
  const int jobs = points * cfg.replicas;
  result.runs.resize(jobs);

  parallel_for(jobs, cfg.threads, [&](int j) {
    const int gi = j / cfg.replicas;
    const int r = j % cfg.replicas;
    const double value = result.grid[gi];
    TrainConfig tc;
    tc.N = cfg.N;
    tc.P = cfg.P;
    tc.M = cfg.M;
    tc.S = cfg.S;
    tc.p_w = cfg.p_w;
    tc.seed = replica_seed(cfg.seed, r);
    tc.log_every = cfg.S;
    if (kind == SweepKind::kPe) {
      tc.p_e = value;
      tc.alpha = cfg.alpha;
    } else {
      tc.alpha = value;
      tc.p_e = cfg.p_e > 0.0 ? cfg.p_e : 1.0 / cfg.N;
    }
    const TrainTrace trace = train(tc);
    RunOutcome o;
    o.value = value;
    o.replica = r;
    o.converged = trace.convergence_step.has_value();
    o.diverged = trace.diverged;
    o.steps = o.converged ? *trace.convergence_step : trace.steps_run;
    o.initial_l1 = trace.initial_l1;
    o.final_l1 = trace.final_l1;
    result.runs[j] = o;
  });

  // Markers. A grid point counts as converging only if every replica
  // converged; past the optimum it counts as failing if no replica reached
  // the convergence threshold within S steps. Rows keep initial/final L1 so
  // softer failure classifications stay recomputable downstream.
  double best_steps = std::numeric_limits<double>::infinity();
  for (int gi = 0; gi < points; ++gi) {
    bool all_conv = true;
    double mean_steps = 0.0;
    for (int r = 0; r < cfg.replicas; ++r) {
      const RunOutcome& o = result.runs[gi * cfg.replicas + r];
      all_conv = all_conv && o.converged;
      mean_steps += static_cast<double>(o.steps);
    }
    mean_steps /= cfg.replicas;
    if (all_conv && mean_steps < best_steps) {
      best_steps = mean_steps;
      result.best = result.grid[gi];
    }
  }
  if (result.best) {
    for (int gi = 0; gi < points; ++gi) {
      if (result.grid[gi] <= *result.best) continue;
      bool all_failed = true;
      for (int r = 0; r < cfg.replicas; ++r) {
        all_failed =
            all_failed && !result.runs[gi * cfg.replicas + r].converged;
      }
      if (all_failed) {
        result.limit = result.grid[gi];
        break;
      }
    }
  }
  return result;
}

}  // namespace

std::vector<double> default_pe_grid(int N, int points) {
  return log_grid(0.3 / N, std::min(15.0 / N, 0.95), points);
}

std::vector<double> default_alpha_grid(int N, int points) {
  const BoundSet b = bounds(N, 1.0);
  const double lo = (b.alpha2 > 0.0 ? b.alpha2 : b.alpha0) / 10.0;
  return log_grid(lo, 4.0 * N, points);
}

SweepResult sweep_pe(const SweepConfig& cfg) {
  return run_sweep(cfg, SweepKind::kPe);
}

SweepResult sweep_alpha(const SweepConfig& cfg) {
  return run_sweep(cfg, SweepKind::kAlpha);
}

LineFit fit_loglog(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  const auto n = xs.size();
  if (n != ys.size() || n < 2) {
    throw std::invalid_argument("fit_loglog: need >= 2 matching points");
  }
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double resid = ly[i] - (fit.intercept + fit.slope * lx[i]);
      ssr += resid * resid;
    }
    fit.slope_se = std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx);
  }
  return fit;
}

void write_sweep_csv(const SweepResult& result, std::ostream& os) {
  os << std::setprecision(17);
  os << "value,replica,converged,diverged,steps,initial_l1,final_l1\n";
  for (const RunOutcome& o : result.runs) {
    os << o.value << ',' << o.replica << ',' << (o.converged ? 1 : 0) << ','
       << (o.diverged ? 1 : 0) << ',' << o.steps << ',' << o.initial_l1 << ','
       << o.final_l1 << '\n';
  }
}

TheoryVsEmpiricalReport run_theory_vs_empirical(
    const TheoryVsEmpiricalConfig& cfg) {
  TheoryVsEmpiricalReport rep;
  rep.alpha = cfg.alpha > 0.0 ? cfg.alpha : 0.9 * bounds(cfg.N, 1.0).alpha2;
  TrainConfig tc;
  tc.N = cfg.N;
  tc.P = 1;
  tc.M = cfg.M;
  tc.p_e = 1.0 / cfg.N;
  tc.p_w = 0.5;
  tc.alpha = rep.alpha;
  tc.S = cfg.steps;
  tc.seed = cfg.seed;
  tc.convergence_threshold = 1e-12;  // run the full horizon
  tc.log_every = 1;
  const TrainTrace trace = train(tc);
  for (const TraceRow& r : trace.rows) {
    rep.mu_emp.push_back(r.mu0);
    rep.sig_emp.push_back(r.sig0);
  }
  DistState s{rep.mu_emp.front(), rep.sig_emp.front(), 0};
  rep.mu_theory.push_back(s.mu);
  rep.sig_theory.push_back(s.sigma_sq);
  for (std::size_t k = 1; k < rep.mu_emp.size(); ++k) {
    s = step_dist(s, rep.alpha, cfg.N);
    rep.mu_theory.push_back(s.mu);
    rep.sig_theory.push_back(s.sigma_sq);
  }
  rep.max_mu_dev = 0.0;
  for (std::size_t k = 0; k < rep.mu_emp.size(); ++k) {
    rep.max_mu_dev =
        std::max(rep.max_mu_dev, std::abs(rep.mu_emp[k] - rep.mu_theory[k]));
  }
  return rep;
}

void write_theory_csv(const TheoryVsEmpiricalReport& r, std::ostream& os) {
  os << std::setprecision(17);
  os << "k,mu_emp,mu_theory,sig_emp,sig_theory\n";
  for (std::size_t k = 0; k < r.mu_emp.size(); ++k) {
    os << k << ',' << r.mu_emp[k] << ',' << r.mu_theory[k] << ','
       << r.sig_emp[k] << ',' << r.sig_theory[k] << '\n';
  }
}

GaussianityReport run_gaussianity(const GaussianityConfig& cfg) {
  if (cfg.snapshots < 2 || cfg.S < cfg.snapshots) {
    throw std::invalid_argument("run_gaussianity: snapshots");
  }
  // The oracle of unit 0 is reproducible from its stream, so the observer can
  // split weights by target without access to trainer internals.
  Xoshiro256pp go = make_stream(cfg.seed, StreamTag::kOracle, 0);
  const Eigen::MatrixXi oracle = sample_oracle(cfg.N, 1, 0.5, go);

  std::unordered_set<long> snap_steps;
  for (int j = 0; j < cfg.snapshots; ++j) {
    snap_steps.insert(
        std::lround(static_cast<double>(j) * cfg.S / (cfg.snapshots - 1)));
  }

  GaussianityReport rep;
  rep.sym_band = 5.0 / std::sqrt(cfg.N / 2.0);

  TrainConfig tc;
  tc.N = cfg.N;
  tc.P = 1;
  tc.M = cfg.M;
  tc.p_e = 1.0 / cfg.N;
  tc.p_w = 0.5;
  tc.alpha = cfg.alpha;
  tc.S = cfg.S;
  tc.seed = cfg.seed;
  tc.convergence_threshold = 1e-12;
  tc.log_every = cfg.S;
  tc.observer = [&](long step, const Eigen::MatrixXd& W) {
    if (snap_steps.find(step) == snap_steps.end()) return;
    std::vector<double> fam0, fam1, all;
    all.reserve(cfg.N);
    for (int i = 0; i < cfg.N; ++i) {
      all.push_back(W(i, 0));
      (oracle(i, 0) == 0 ? fam0 : fam1).push_back(W(i, 0));
    }
    const FamilyMoments fm = family_moments(W, oracle);
    SnapshotStats st;
    st.step = step;
    st.qq0 = qq_gaussian(fam0).correlation;
    st.qq1 = qq_gaussian(fam1).correlation;
    st.qq_combined = qq_gaussian(all).correlation;
    st.mu0 = fm.mu0;
    st.sig0 = fm.sig0_sq;
    st.mu1 = fm.mu1;
    st.sig1 = fm.sig1_sq;
    st.sym_residual = std::abs(fm.mu0 - (1.0 - fm.mu1));
    st.n0 = fm.n0;
    st.n1 = fm.n1;
    rep.snaps.push_back(st);
  };
  train(tc);

  rep.all_qq_ok = !rep.snaps.empty();
  rep.all_sym_ok = !rep.snaps.empty();
  for (const SnapshotStats& st : rep.snaps) {
    rep.all_qq_ok = rep.all_qq_ok && st.qq0 >= cfg.qq_threshold &&
                    st.qq1 >= cfg.qq_threshold;
    rep.all_sym_ok = rep.all_sym_ok && st.sym_residual <= rep.sym_band;
  }
  return rep;
}

void write_gaussianity_csv(const GaussianityReport& r, std::ostream& os) {
  os << std::setprecision(17);
  os << "step,qq0,qq1,qq_combined,mu0,sig0,mu1,sig1,sym_residual,n0,n1\n";
  for (const SnapshotStats& s : r.snaps) {
    os << s.step << ',' << s.qq0 << ',' << s.qq1 << ',' << s.qq_combined << ','
       << s.mu0 << ',' << s.sig0 << ',' << s.mu1 << ',' << s.sig1 << ','
       << s.sym_residual << ',' << s.n0 << ',' << s.n1 << '\n';
  }
}

PwInvarianceReport run_pw_invariance(const PwInvarianceConfig& cfg) {
  if (cfg.pw_values.empty()) {
    throw std::invalid_argument("run_pw_invariance: empty pw grid");
  }
  PwInvarianceReport rep;
  rep.pw_values = cfg.pw_values;
  const int log_every = std::max(1, cfg.S / cfg.snapshots);
  double min_count = std::numeric_limits<double>::infinity();
  for (double pw : cfg.pw_values) {
    TrainConfig tc;
    tc.N = cfg.N;
    tc.P = 1;
    tc.M = cfg.M;
    tc.p_e = 1.0 / cfg.N;
    tc.p_w = pw;
    tc.alpha = cfg.alpha;
    tc.S = cfg.S;
    tc.seed = cfg.seed;  // shared: identical init and batches across runs
    tc.convergence_threshold = 1e-12;
    tc.log_every = log_every;
    const TrainTrace trace = train(tc);
    if (rep.steps.empty()) {
      for (const TraceRow& r : trace.rows) rep.steps.push_back(r.step);
    }
    std::vector<double> m0, m1;
    for (const TraceRow& r : trace.rows) {
      m0.push_back(r.mu0);
      m1.push_back(r.mu1);
    }
    rep.mu0.push_back(std::move(m0));
    rep.mu1.push_back(std::move(m1));
    min_count = std::min({min_count, (1.0 - pw) * cfg.N, pw * cfg.N});
  }
  rep.band = 5.0 / std::sqrt(std::max(1.0, min_count));
  rep.max_dev = 0.0;
  for (std::size_t a = 0; a < rep.mu0.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.mu0.size(); ++b) {
      const std::size_t len = std::min(rep.mu0[a].size(), rep.mu0[b].size());
      for (std::size_t k = 0; k < len; ++k) {
        if (std::isfinite(rep.mu0[a][k]) && std::isfinite(rep.mu0[b][k])) {
          rep.max_dev =
              std::max(rep.max_dev, std::abs(rep.mu0[a][k] - rep.mu0[b][k]));
        }
        if (std::isfinite(rep.mu1[a][k]) && std::isfinite(rep.mu1[b][k])) {
          rep.max_dev =
              std::max(rep.max_dev, std::abs(rep.mu1[a][k] - rep.mu1[b][k]));
        }
      }
    }
  }
  rep.ok = rep.max_dev <= rep.band;
  return rep;
}

void write_pw_invariance_csv(const PwInvarianceReport& r, std::ostream& os) {
  os << std::setprecision(17);
  os << "pw,step,mu0,mu1\n";
  for (std::size_t run = 0; run < r.pw_values.size(); ++run) {
    for (std::size_t k = 0; k < r.mu0[run].size(); ++k) {
      os << r.pw_values[run] << ',' << r.steps[k] << ',' << r.mu0[run][k]
         << ',' << r.mu1[run][k] << '\n';
    }
  }
}

GeneralizationReport run_generalization(const GeneralizationConfig& cfg) {
  if (cfg.N < 1 || cfg.N > 24) {
    throw std::invalid_argument("run_generalization: need 1 <= N <= 24");
  }
  const double pe = cfg.p_e > 0.0 ? cfg.p_e : 1.0 / cfg.N;

  Xoshiro256pp go = make_stream(cfg.seed, StreamTag::kOracle, 0);
  const Eigen::VectorXi w_true = sample_oracle(cfg.N, 1, cfg.p_w, go).col(0);
  std::uint32_t support = 0;
  for (int i = 0; i < cfg.N; ++i) {
    if (w_true(i) != 0) support |= (1u << i);
  }

  Eigen::VectorXd w(cfg.N);
  Xoshiro256pp gi = make_stream(cfg.seed, StreamTag::kWeightInit, 0);
  for (int i = 0; i < cfg.N; ++i) w(i) = 0.5 + 0.5 * normal01(gi);

  Mlp mlp(cfg.N, cfg.hidden, cfg.seed);
  const Eigen::MatrixXd table_X = bipolar_table(cfg.N);
  const Eigen::VectorXd table_y = parity_targets(w_true);
  const double table_size = static_cast<double>(std::int64_t{1} << cfg.N);

  std::unordered_set<std::uint32_t> seen;
  GeneralizationReport rep;

  const auto evaluate = [&](long step) {
    GeneralizationPoint pt;
    pt.step = step;
    pt.coverage = static_cast<double>(seen.size()) / table_size;
    pt.prod_val = truth_table_accuracy(w, w_true);
    pt.mlp_val = mlp.accuracy(table_X, table_y);
    if (!seen.empty()) {
      Eigen::MatrixXd Xs(static_cast<Eigen::Index>(seen.size()), cfg.N);
      Eigen::VectorXd ys(static_cast<Eigen::Index>(seen.size()));
      Eigen::Index r = 0;
      for (std::uint32_t mask : seen) {
        for (int i = 0; i < cfg.N; ++i) {
          Xs(r, i) = (mask >> i) & 1 ? -1.0 : 1.0;
        }
        ys(r) = std::popcount(mask & support) & 1;
        ++r;
      }
      pt.mlp_train = mlp.accuracy(Xs, ys);
    }
    rep.points.push_back(pt);
    if (!rep.prod_val1_step && pt.prod_val == 1.0) {
      rep.prod_val1_step = step;
      rep.coverage_at_val1 = pt.coverage;
      rep.mlp_val_at_val1 = pt.mlp_val;
    }
  };

  evaluate(0);
  for (int k = 1; k <= cfg.S; ++k) {
    Xoshiro256pp gb = make_stream(cfg.seed, StreamTag::kBatch, 0, k);
    const SparseBatch batch = sample_bernoulli_batch(cfg.N, cfg.M, pe, gb);
    Eigen::VectorXd y_b(cfg.M);
    for (int m = 0; m < cfg.M; ++m) {
      std::uint32_t mask = 0;
      for (std::int64_t p = batch.row_ptr[m]; p < batch.row_ptr[m + 1]; ++p) {
        mask |= (1u << batch.cols[p]);
      }
      seen.insert(mask);
      y_b(m) = std::popcount(mask & support) & 1;
    }
    sgd_step_unit(w, batch, w_true, cfg.alpha);
    mlp.train_batch(bipolar_from_bits(batch), y_b, cfg.mlp_lr);
    if (k % cfg.val_every == 0 || k == cfg.S) evaluate(k);
  }
  return rep;
}

void write_generalization_csv(const GeneralizationReport& r, std::ostream& os) {
  os << std::setprecision(17);
  os << "step,coverage,prod_val,mlp_val,mlp_train\n";
  for (const GeneralizationPoint& p : r.points) {
    os << p.step << ',' << p.coverage << ',' << p.prod_val << ',' << p.mlp_val
       << ',' << p.mlp_train << '\n';
  }
}

EffectiveLrReport run_effective_lr(const EffectiveLrConfig& cfg) {
  std::vector<EffectiveLrPair> pairs = cfg.pairs;
  if (pairs.empty()) {
    pairs = {{100, 1.0, 0.01},  {100, 2.0, 0.005}, {100, 10.0, 0.001},
             {100, 20.0, 0.0005}, {200, 2.0, 0.005}, {100, 1.0, 0.005},
             {100, 2.0, 0.0025}};
  }
  EffectiveLrReport rep;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    TrainConfig tc;
    tc.N = pairs[i].N;
    tc.P = cfg.P;
    tc.M = cfg.M;
    tc.p_e = pairs[i].p_e;
    tc.p_w = cfg.p_w;
    tc.alpha = pairs[i].alpha;
    tc.S = cfg.S;
    tc.seed = replica_seed(cfg.seed, static_cast<int>(i));
    tc.log_every = cfg.S;
    const TrainTrace trace = train(tc);
    EffectiveLrOutcome o;
    o.pair = pairs[i];
    o.rate = pairs[i].alpha * pairs[i].p_e;
    o.converged = trace.convergence_step.has_value();
    o.steps = o.converged ? *trace.convergence_step : trace.steps_run;
    rep.outcomes.push_back(o);
  }
  // Group outcomes whose rates agree to relative 1e-9 and compare steps.
  rep.worst_group_ratio = 1.0;
  std::vector<bool> used(rep.outcomes.size(), false);
  for (std::size_t i = 0; i < rep.outcomes.size(); ++i) {
    if (used[i]) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool all_conv = true;
    int count = 0;
    for (std::size_t j = i; j < rep.outcomes.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(rep.outcomes[j].rate / rep.outcomes[i].rate - 1.0) < 1e-9) {
        used[j] = true;
        ++count;
        all_conv = all_conv && rep.outcomes[j].converged;
        lo = std::min(lo, static_cast<double>(rep.outcomes[j].steps));
        hi = std::max(hi, static_cast<double>(rep.outcomes[j].steps));
      }
    }
    if (count >= 2) {
      const double ratio =
          all_conv ? hi / lo : std::numeric_limits<double>::infinity();
      rep.worst_group_ratio = std::max(rep.worst_group_ratio, ratio);
    }
  }
  return rep;
}

void write_effective_lr_csv(const EffectiveLrReport& r, std::ostream& os) {
  os << std::setprecision(17);
  os << "N,alpha,pe,rate,converged,steps\n";
  for (const EffectiveLrOutcome& o : r.outcomes) {
    os << o.pair.N << ',' << o.pair.alpha << ',' << o.pair.p_e << ',' << o.rate
       << ',' << (o.converged ? 1 : 0) << ',' << o.steps << '\n';
  }
}

}  // namespace parity
