// Command-line front end for the parity-unit laboratory: each subcommand runs
// one experiment, writes one CSV plus a manifest.json into --out, and prints a
// short summary to stdout.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paritylab/data.hpp"
#include "paritylab/dynamics.hpp"
#include "paritylab/experiments.hpp"
#include "paritylab/gradients.hpp"
#include "paritylab/io.hpp"
#include "paritylab/rng.hpp"
#include "paritylab/stats.hpp"
#include "paritylab/trainer.hpp"

namespace {

using parity::Json;

// Common per-subcommand options; values apply only when the flag was given.
struct Common {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 1;
  int threads = 1;
  int n = 0;
  int m = 0;
  double alpha = 0.0;
  double pe = 0.0;
  long steps = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* m_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* pe_opt = nullptr;
  CLI::Option* steps_opt = nullptr;

  void attach(CLI::App* sub, const std::string& default_out) {
    out = default_out;
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out, "output directory");
    seed_opt = sub->add_option("--seed", seed, "master seed");
    threads_opt = sub->add_option("--threads", threads, "worker threads");
    n_opt = sub->add_option("--n", n, "input dimension N");
    m_opt = sub->add_option("--m", m, "batch size M");
    alpha_opt = sub->add_option("--alpha", alpha, "learning rate");
    pe_opt = sub->add_option("--pe", pe, "input activation probability");
    steps_opt = sub->add_option("--steps", steps, "training steps");
  }

  Json load() const {
    return config_path.empty() ? Json::object()
                               : parity::load_json_file(config_path);
  }
};

template <typename T>
void jget(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// --- train ------------------------------------------------------------------

int cmd_train(const Common& c) {
  parity::TrainConfig tc;
  tc.N = 100;
  tc.M = 1000;
  tc.S = 2000;
  tc.alpha = 1.0;
  tc.p_e = 0.0;
  const Json j = c.load();
  jget(j, "N", tc.N);
  jget(j, "P", tc.P);
  jget(j, "M", tc.M);
  jget(j, "p_e", tc.p_e);
  jget(j, "p_w", tc.p_w);
  jget(j, "alpha", tc.alpha);
  jget(j, "S", tc.S);
  jget(j, "seed", tc.seed);
  jget(j, "convergence_threshold", tc.convergence_threshold);
  jget(j, "init_mu", tc.init_mu);
  jget(j, "init_sigma_sq", tc.init_sigma_sq);
  jget(j, "fixed_dataset", tc.fixed_dataset);
  jget(j, "log_every", tc.log_every);
  if (c.n_opt->count()) tc.N = c.n;
  if (c.m_opt->count()) tc.M = c.m;
  if (c.alpha_opt->count()) tc.alpha = c.alpha;
  if (c.pe_opt->count()) tc.p_e = c.pe;
  if (c.steps_opt->count()) tc.S = c.steps;
  if (c.seed_opt->count()) tc.seed = c.seed;
  if (tc.p_e <= 0.0) tc.p_e = 1.0 / tc.N;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::TrainTrace trace = parity::train(tc);
  auto os = parity::open_out(c.out, "trace.csv");
  parity::write_trace_csv(trace, os);

  Json echo{{"N", tc.N},         {"P", tc.P},
            {"M", tc.M},         {"p_e", tc.p_e},
            {"p_w", tc.p_w},     {"alpha", tc.alpha},
            {"S", tc.S},         {"log_every", tc.log_every},
            {"fixed_dataset", tc.fixed_dataset}};
  parity::write_manifest(c.out, "train", echo, tc.seed, elapsed_seconds(t0));

  std::cout << "steps_run=" << trace.steps_run
            << " final_l1=" << trace.final_l1;
  if (trace.convergence_step) {
    std::cout << " converged_at=" << *trace.convergence_step;
  } else {
    std::cout << (trace.diverged ? " diverged" : " not_converged");
  }
  std::cout << '\n';
  return 0;
}

// --- sweeps -----------------------------------------------------------------

int cmd_sweep(const Common& c, bool over_pe) {
  parity::SweepConfig sc;
  sc.N = 100;
  const Json j = c.load();
  jget(j, "N", sc.N);
  jget(j, "M", sc.M);
  jget(j, "P", sc.P);
  jget(j, "S", sc.S);
  jget(j, "alpha", sc.alpha);
  jget(j, "p_e", sc.p_e);
  jget(j, "p_w", sc.p_w);
  jget(j, "seed", sc.seed);
  jget(j, "replicas", sc.replicas);
  jget(j, "threads", sc.threads);
  jget(j, "grid", sc.grid);
  if (c.n_opt->count()) sc.N = c.n;
  if (c.m_opt->count()) sc.M = c.m;
  if (c.alpha_opt->count()) sc.alpha = c.alpha;
  if (c.pe_opt->count()) sc.p_e = c.pe;
  if (c.steps_opt->count()) sc.S = c.steps;
  if (c.seed_opt->count()) sc.seed = c.seed;
  if (c.threads_opt->count()) sc.threads = c.threads;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::SweepResult res =
      over_pe ? parity::sweep_pe(sc) : parity::sweep_alpha(sc);
  const std::string name = over_pe ? "sweep_pe" : "sweep_alpha";
  auto os = parity::open_out(c.out, name + ".csv");
  parity::write_sweep_csv(res, os);

  Json echo{{"N", sc.N},       {"M", sc.M},
            {"P", sc.P},       {"S", sc.S},
            {"alpha", sc.alpha}, {"p_e", sc.p_e},
            {"p_w", sc.p_w},   {"replicas", sc.replicas},
            {"grid", res.grid}};
  parity::write_manifest(c.out, name, echo, sc.seed, elapsed_seconds(t0));

  std::cout << name << " points=" << res.grid.size();
  if (res.best) {
    std::cout << " best=" << *res.best;
  } else {
    std::cout << " best=none";
  }
  if (res.limit) {
    std::cout << " limit=" << *res.limit;
  } else {
    std::cout << " limit=none";
  }
  // Log-log slope of mean convergence steps over the converging grid points.
  std::vector<double> xs, ys;
  for (std::size_t gi = 0; gi < res.grid.size(); ++gi) {
    bool all_conv = true;
    double mean_steps = 0.0;
    for (int r = 0; r < sc.replicas; ++r) {
      const parity::RunOutcome& o = res.runs[gi * sc.replicas + r];
      all_conv = all_conv && o.converged;
      mean_steps += static_cast<double>(o.steps);
    }
    if (all_conv) {
      xs.push_back(res.grid[gi]);
      ys.push_back(mean_steps / sc.replicas);
    }
  }
  if (xs.size() >= 2) {
    const parity::LineFit fit = parity::fit_loglog(xs, ys);
    std::cout << " slope=" << fit.slope << " slope_se=" << fit.slope_se;
  }
  std::cout << '\n';
  return 0;
}

// --- distributional experiments ----------------------------------------------

int cmd_gaussianity(const Common& c) {
  parity::GaussianityConfig gc;
  const Json j = c.load();
  jget(j, "N", gc.N);
  jget(j, "M", gc.M);
  jget(j, "alpha", gc.alpha);
  jget(j, "S", gc.S);
  jget(j, "snapshots", gc.snapshots);
  jget(j, "qq_threshold", gc.qq_threshold);
  jget(j, "seed", gc.seed);
  if (c.n_opt->count()) gc.N = c.n;
  if (c.m_opt->count()) gc.M = c.m;
  if (c.alpha_opt->count()) gc.alpha = c.alpha;
  if (c.steps_opt->count()) gc.S = c.steps;
  if (c.seed_opt->count()) gc.seed = c.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::GaussianityReport rep = parity::run_gaussianity(gc);
  auto os = parity::open_out(c.out, "gaussianity.csv");
  parity::write_gaussianity_csv(rep, os);

  Json echo{{"N", gc.N},
            {"M", gc.M},
            {"alpha", gc.alpha},
            {"S", gc.S},
            {"snapshots", gc.snapshots},
            {"qq_threshold", gc.qq_threshold}};
  parity::write_manifest(c.out, "gaussianity", echo, gc.seed,
                         elapsed_seconds(t0));

  std::cout << "snapshots=" << rep.snaps.size()
            << " all_qq_ok=" << (rep.all_qq_ok ? 1 : 0)
            << " all_sym_ok=" << (rep.all_sym_ok ? 1 : 0)
            << " sym_band=" << rep.sym_band << '\n';
  return 0;
}

int cmd_pw_invariance(const Common& c) {
  parity::PwInvarianceConfig pc;
  const Json j = c.load();
  jget(j, "N", pc.N);
  jget(j, "M", pc.M);
  jget(j, "alpha", pc.alpha);
  jget(j, "S", pc.S);
  jget(j, "snapshots", pc.snapshots);
  jget(j, "pw_values", pc.pw_values);
  jget(j, "seed", pc.seed);
  if (c.n_opt->count()) pc.N = c.n;
  if (c.m_opt->count()) pc.M = c.m;
  if (c.alpha_opt->count()) pc.alpha = c.alpha;
  if (c.steps_opt->count()) pc.S = c.steps;
  if (c.seed_opt->count()) pc.seed = c.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::PwInvarianceReport rep = parity::run_pw_invariance(pc);
  auto os = parity::open_out(c.out, "pw_invariance.csv");
  parity::write_pw_invariance_csv(rep, os);

  Json echo{{"N", pc.N},
            {"M", pc.M},
            {"alpha", pc.alpha},
            {"S", pc.S},
            {"pw_values", pc.pw_values}};
  parity::write_manifest(c.out, "pw-invariance", echo, pc.seed,
                         elapsed_seconds(t0));

  std::cout << "max_dev=" << rep.max_dev << " band=" << rep.band
            << " ok=" << (rep.ok ? 1 : 0) << '\n';
  return 0;
}

int cmd_theory_vs_empirical(const Common& c) {
  parity::TheoryVsEmpiricalConfig tc;
  const Json j = c.load();
  jget(j, "N", tc.N);
  jget(j, "M", tc.M);
  jget(j, "alpha", tc.alpha);
  jget(j, "steps", tc.steps);
  jget(j, "seed", tc.seed);
  if (c.n_opt->count()) tc.N = c.n;
  if (c.m_opt->count()) tc.M = c.m;
  if (c.alpha_opt->count()) tc.alpha = c.alpha;
  if (c.steps_opt->count()) tc.steps = c.steps;
  if (c.seed_opt->count()) tc.seed = c.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::TheoryVsEmpiricalReport rep =
      parity::run_theory_vs_empirical(tc);
  auto os = parity::open_out(c.out, "theory_vs_empirical.csv");
  parity::write_theory_csv(rep, os);

  Json echo{
      {"N", tc.N}, {"M", tc.M}, {"alpha", rep.alpha}, {"steps", tc.steps}};
  parity::write_manifest(c.out, "theory-vs-empirical", echo, tc.seed,
                         elapsed_seconds(t0));

  std::cout << "alpha=" << rep.alpha << " max_mu_dev=" << rep.max_mu_dev
            << '\n';
  return 0;
}

// --- generalization and effective learning rate ------------------------------

int cmd_generalization(const Common& c) {
  parity::GeneralizationConfig gc;
  const Json j = c.load();
  jget(j, "N", gc.N);
  jget(j, "M", gc.M);
  jget(j, "p_e", gc.p_e);
  jget(j, "p_w", gc.p_w);
  jget(j, "alpha", gc.alpha);
  jget(j, "mlp_lr", gc.mlp_lr);
  jget(j, "hidden", gc.hidden);
  jget(j, "S", gc.S);
  jget(j, "val_every", gc.val_every);
  jget(j, "seed", gc.seed);
  if (c.n_opt->count()) gc.N = c.n;
  if (c.m_opt->count()) gc.M = c.m;
  if (c.alpha_opt->count()) gc.alpha = c.alpha;
  if (c.pe_opt->count()) gc.p_e = c.pe;
  if (c.steps_opt->count()) gc.S = c.steps;
  if (c.seed_opt->count()) gc.seed = c.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::GeneralizationReport rep = parity::run_generalization(gc);
  auto os = parity::open_out(c.out, "generalization.csv");
  parity::write_generalization_csv(rep, os);

  Json echo{{"N", gc.N},         {"M", gc.M},      {"p_e", gc.p_e},
            {"alpha", gc.alpha}, {"mlp_lr", gc.mlp_lr},
            {"hidden", gc.hidden}, {"S", gc.S},    {"val_every", gc.val_every}};
  parity::write_manifest(c.out, "generalization", echo, gc.seed,
                         elapsed_seconds(t0));

  if (rep.prod_val1_step) {
    std::cout << "prod_val1_step=" << *rep.prod_val1_step
              << " coverage=" << rep.coverage_at_val1
              << " mlp_val=" << rep.mlp_val_at_val1 << '\n';
  } else {
    std::cout << "product unit never reached validation 1.0\n";
  }
  return 0;
}

int cmd_effective_lr(const Common& c) {
  parity::EffectiveLrConfig ec;
  const Json j = c.load();
  if (j.contains("pairs")) {
    for (const Json& e : j.at("pairs")) {
      ec.pairs.push_back({e.at(0).get<int>(), e.at(1).get<double>(),
                          e.at(2).get<double>()});
    }
  }
  jget(j, "M", ec.M);
  jget(j, "P", ec.P);
  jget(j, "S", ec.S);
  jget(j, "p_w", ec.p_w);
  jget(j, "seed", ec.seed);
  if (c.m_opt->count()) ec.M = c.m;
  if (c.steps_opt->count()) ec.S = c.steps;
  if (c.seed_opt->count()) ec.seed = c.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const parity::EffectiveLrReport rep = parity::run_effective_lr(ec);
  auto os = parity::open_out(c.out, "effective_lr.csv");
  parity::write_effective_lr_csv(rep, os);

  Json echo{{"M", ec.M}, {"P", ec.P}, {"S", ec.S}, {"p_w", ec.p_w}};
  parity::write_manifest(c.out, "effective-lr", echo, ec.seed,
                         elapsed_seconds(t0));

  std::cout << "pairs=" << rep.outcomes.size()
            << " worst_group_ratio=" << rep.worst_group_ratio << '\n';
  return 0;
}

// --- bounds table -------------------------------------------------------------

int cmd_bounds(const Common& c) {
  std::vector<int> Ns = {8,  10,  14,  18,  20,   30,   43,   50,
                         100, 200, 500, 1000, 2000, 5000, 10000};
  double alpha = 1.0;
  const Json j = c.load();
  jget(j, "N_values", Ns);
  jget(j, "alpha", alpha);
  if (c.n_opt->count()) Ns = {c.n};
  if (c.alpha_opt->count()) alpha = c.alpha;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<parity::BoundSet> rows;
  rows.reserve(Ns.size());
  for (int N : Ns) rows.push_back(parity::bounds(N, alpha));
  auto os = parity::open_out(c.out, "bounds.csv");
  parity::write_bounds_csv(rows, os);

  Json echo{{"N_values", Ns}, {"alpha", alpha}};
  std::uint64_t seed = c.seed_opt->count() ? c.seed : 1;
  parity::write_manifest(c.out, "bounds", echo, seed, elapsed_seconds(t0));

  std::cout << std::setw(7) << "N" << std::setw(14) << "alpha0"
            << std::setw(14) << "alpha1" << std::setw(14) << "alpha2"
            << std::setw(12) << "epsilon" << std::setw(12) << "phi_min'"
            << std::setw(12) << "phi_max'" << std::setw(13) << "delta_max"
            << '\n';
  std::cout << std::setprecision(6);
  for (const parity::BoundSet& b : rows) {
    std::cout << std::setw(7) << b.N << std::setw(14) << b.alpha0
              << std::setw(14) << b.alpha1 << std::setw(14) << b.alpha2
              << std::setw(12) << b.epsilon << std::setw(12)
              << b.phi_min_prime << std::setw(12) << b.phi_max_prime
              << std::setw(13) << b.delta_max << '\n';
  }
  return 0;
}

// --- gradient checks -----------------------------------------------------------

template <typename F>
Eigen::VectorXd fd_grad(const F& f, Eigen::VectorXd w, double h) {
  Eigen::VectorXd g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double w0 = w(i);
    w(i) = w0 + h;
    const double fp = f(w);
    w(i) = w0 - h;
    const double fm = f(w);
    w(i) = w0;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

struct CheckRow {
  std::string name;
  double err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

int cmd_gradcheck(const Common& c) {
  std::uint64_t seed = c.seed_opt->count() ? c.seed : 1;
  const int N = 6, M = 8;
  const double h = 1e-5, tol = 1e-5;
  parity::Xoshiro256pp g =
      parity::make_stream(seed, parity::StreamTag::kGeneric, 0);

  Eigen::MatrixXd X(M, N);
  Eigen::MatrixXi B(M, N);
  for (int r = 0; r < M; ++r) {
    for (int i = 0; i < N; ++i) {
      X(r, i) = 1.0 + 0.4 * parity::normal01(g);
      B(r, i) = parity::uniform01(g) < 0.5 ? 1 : 0;
    }
  }
  Eigen::VectorXd w(N), wt(N);
  for (int i = 0; i < N; ++i) {
    w(i) = 0.2 + 0.6 * parity::uniform01(g);
    wt(i) = parity::uniform01(g) < 0.5 ? 1.0 : 0.0;
  }

  std::vector<CheckRow> rows;
  const auto push = [&](const std::string& name, double err, double t) {
    rows.push_back({name, err, t, err <= t});
  };

  push("sum_grad_fd",
       rel_err(parity::sum_grad(X, w, wt),
               fd_grad([&](const Eigen::VectorXd& v) {
                 return parity::sum_risk(X, v, wt);
               }, w, h)),
       tol);
  push("naive_grad_fd",
       rel_err(parity::naive_product_grad(X, w, wt),
               fd_grad([&](const Eigen::VectorXd& v) {
                 return parity::naive_product_risk(X, v, wt);
               }, w, h)),
       tol);
  push("ne_grad_fd",
       rel_err(parity::ne_product_grad(X, w, wt),
               fd_grad([&](const Eigen::VectorXd& v) {
                 return parity::ne_product_risk(X, v, wt);
               }, w, h)),
       tol);
  push("xor_grad_fd",
       rel_err(parity::xor_grad(B, w, wt),
               fd_grad([&](const Eigen::VectorXd& v) {
                 return parity::xor_risk(B, v, wt);
               }, w, h)),
       tol);

  // Hessians: finite differences of the analytic gradient, column by column.
  const auto fd_hess = [&](const auto& grad_fn) {
    Eigen::MatrixXd H(N, N);
    Eigen::VectorXd v = w;
    for (int i = 0; i < N; ++i) {
      const double w0 = v(i);
      v(i) = w0 + h;
      const Eigen::VectorXd gp = grad_fn(v);
      v(i) = w0 - h;
      const Eigen::VectorXd gm = grad_fn(v);
      v(i) = w0;
      H.col(i) = (gp - gm) / (2.0 * h);
    }
    return H;
  };
  push("naive_hessian_fd",
       rel_err(parity::naive_product_hessian(X, w, wt),
               fd_hess([&](const Eigen::VectorXd& v) {
                 return parity::naive_product_grad(X, v, wt);
               })),
       tol);
  push("ne_hessian_fd",
       rel_err(parity::ne_product_hessian(X, w, wt),
               fd_hess([&](const Eigen::VectorXd& v) {
                 return parity::ne_product_grad(X, v, wt);
               })),
       tol);
  push("xor_hessian_fd",
       rel_err(parity::xor_hessian(B, w, wt),
               fd_hess([&](const Eigen::VectorXd& v) {
                 return parity::xor_grad(B, v, wt);
               })),
       tol);

  // Monte-Carlo agreement of the closed-form input expectations (4 SE).
  {
    Eigen::VectorXd wt8(8), w8(8);
    parity::Xoshiro256pp g2 =
        parity::make_stream(seed, parity::StreamTag::kGeneric, 1);
    for (int i = 0; i < 8; ++i) {
      w8(i) = 0.2 + 0.6 * parity::uniform01(g2);
      wt8(i) = parity::uniform01(g2) < 0.5 ? 1.0 : 0.0;
    }
    const double pe = 0.2;
    const Eigen::VectorXd exact =
        parity::expected_xor_grad_bernoulli(w8, wt8, pe);
    const parity::McGradient mc =
        parity::mc_expected_gradient(w8, wt8, pe, 2000, seed);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
      worst = std::max(worst, std::abs(mc.mean(i) - exact(i)) /
                                  std::max(mc.se(i), 1e-12));
    }
    rows.push_back({"expected_grad_mc_z", worst, 4.0, worst <= 4.0});
  }
  {
    parity::GaussianFamilyParams fam;
    fam.mu0 = 0.45;
    fam.sigma0_sq = 0.01;
    fam.mu1 = 0.55;
    fam.sigma1_sq = 0.02;
    fam.p_w = 0.5;
    const double pe = 0.05;
    const double exact =
        parity::expected_grad_gaussian(fam, pe, 12, 0.3, 1.0);
    const parity::McScalar mc =
        parity::mc_expected_grad_gaussian(fam, pe, 12, 0.3, 1.0, 4000, seed);
    const double z = std::abs(mc.mean - exact) / std::max(mc.se, 1e-12);
    rows.push_back({"expected_grad_gaussian_mc_z", z, 4.0, z <= 4.0});
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto os = parity::open_out(c.out, "gradcheck.csv");
  os << std::setprecision(17) << "check,err,tol,pass\n";
  bool all_pass = true;
  for (const CheckRow& r : rows) {
    os << r.name << ',' << r.err << ',' << r.tol << ',' << (r.pass ? 1 : 0)
       << '\n';
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " err=" << r.err
              << " tol=" << r.tol << '\n';
    all_pass = all_pass && r.pass;
  }
  Json echo{{"N", N}, {"M", M}, {"h", h}, {"tol", tol}};
  parity::write_manifest(c.out, "gradcheck", echo, seed, elapsed_seconds(t0));
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parity-unit laboratory experiment runner"};
  app.require_subcommand(1);

  Common c_train, c_spe, c_sal, c_gauss, c_pw, c_tve, c_gen, c_elr, c_bounds,
      c_gc;
  c_train.attach(app.add_subcommand("train", "single training run"),
                 "out/train");
  c_spe.attach(app.add_subcommand("sweep-pe",
                                  "convergence sweep over activation p_e"),
               "out/sweep_pe");
  c_sal.attach(app.add_subcommand("sweep-alpha",
                                  "convergence sweep over learning rate"),
               "out/sweep_alpha");
  c_gauss.attach(app.add_subcommand("gaussianity",
                                    "weight-family normality during training"),
                 "out/gaussianity");
  c_pw.attach(app.add_subcommand("pw-invariance",
                                 "trajectory invariance to oracle density"),
              "out/pw_invariance");
  c_tve.attach(app.add_subcommand("theory-vs-empirical",
                                  "affine mean/variance recurrence vs SGD"),
               "out/theory_vs_empirical");
  c_gen.attach(app.add_subcommand("generalization",
                                  "product unit vs MLP on held-out inputs"),
               "out/generalization");
  c_elr.attach(app.add_subcommand("effective-lr",
                                  "alpha*p_e determines convergence speed"),
               "out/effective_lr");
  c_bounds.attach(app.add_subcommand("bounds",
                                     "learning-rate thresholds and envelopes"),
                  "out/bounds");
  c_gc.attach(app.add_subcommand("gradcheck",
                                 "analytic gradients vs FD and Monte Carlo"),
              "out/gradcheck");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("train")) return cmd_train(c_train);
    if (app.got_subcommand("sweep-pe")) return cmd_sweep(c_spe, true);
    if (app.got_subcommand("sweep-alpha")) return cmd_sweep(c_sal, false);
    if (app.got_subcommand("gaussianity")) return cmd_gaussianity(c_gauss);
    if (app.got_subcommand("pw-invariance")) return cmd_pw_invariance(c_pw);
    if (app.got_subcommand("theory-vs-empirical")) {
      return cmd_theory_vs_empirical(c_tve);
    }
    if (app.got_subcommand("generalization")) return cmd_generalization(c_gen);
    if (app.got_subcommand("effective-lr")) return cmd_effective_lr(c_elr);
    if (app.got_subcommand("bounds")) return cmd_bounds(c_bounds);
    if (app.got_subcommand("gradcheck")) return cmd_gradcheck(c_gc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
