#include "paritylab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "paritylab/numeric.hpp"

namespace parity {

namespace {

double epsilon_of(int N) {
  if (N <= 2) throw std::invalid_argument("epsilon_of: need N > 2");
  return (402.0 * N - 216.0) / (2.0 * N * (32.0 * N - 72.0));
}

// A0^{N-1} and B0^{N-1} at sparsity p_e = 1/N.
struct PowerTerms {
  double a_pow = 0.0;
  double b_pow = 0.0;
};

PowerTerms power_terms(const DistState& s, int N) {
  const double pe = 1.0 / static_cast<double>(N);
  const double A0 =
      4.0 * pe * (s.mu * s.mu + s.sigma_sq) - 4.0 * pe * s.mu + 1.0;
  const double B0 = 1.0 - 2.0 * pe * s.mu;
  return {pow_n(A0, N - 1), pow_n(B0, N - 1)};
}

double interval_distance(double x, double lo, double hi) {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

}  // namespace

UpdateCoeffs update_coeffs(const DistState& s, double alpha, int N) {
  if (N < 1) throw std::invalid_argument("update_coeffs: need N >= 1");
  const PowerTerms pt = power_terms(s, N);
  UpdateCoeffs u;
  u.m = 1.0 - (2.0 * alpha / N) * pt.a_pow;
  u.c = (alpha / N) * (pt.a_pow - pt.b_pow);
  u.xi = 4.0 * (s.mu * s.mu + s.sigma_sq - s.mu);
  u.zeta = -2.0 * s.mu;
  return u;
}

double family1_offset(const DistState& s, double alpha, int N) {
  if (N < 1) throw std::invalid_argument("family1_offset: need N >= 1");
  const PowerTerms pt = power_terms(s, N);
  return (alpha / N) * (pt.a_pow + pt.b_pow);
}

DistState step_dist(const DistState& s, double alpha, int N) {
  const UpdateCoeffs u = update_coeffs(s, alpha, N);
  DistState next;
  next.mu = u.m * s.mu + u.c;
  next.sigma_sq = u.m * u.m * s.sigma_sq;
  next.k = s.k + 1;
  return next;
}

std::vector<DistState> iterate_dist(const DistState& init, double alpha, int N,
                                    int steps) {
  std::vector<DistState> traj;
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  traj.push_back(init);
  for (int k = 0; k < steps; ++k) {
    traj.push_back(step_dist(traj.back(), alpha, N));
  }
  return traj;
}

BoundSet bounds(int N, double alpha) {
  if (N <= 2) throw std::invalid_argument("bounds: need N > 2");
  BoundSet b;
  b.N = N;
  b.alpha = alpha;
  b.eta_xi_max = 153.0 / (32.0 * N - 72.0);
  b.eta_zeta_max = 3.0 / (2.0 * N);
  b.eta_xi_max_zero_var = 65.0 / (32.0 * N - 40.0);
  b.epsilon = epsilon_of(N);
  b.alpha0 = N * std::exp(-(72.0 * N - 9.0) / (32.0 * N - 72.0));
  b.alpha1 = b.alpha0 / 2.0;
  const double bracket = 1.5 * std::exp(2.25) * std::exp(b.eta_xi_max) -
                         std::exp(-1.0) * std::exp(-b.eta_zeta_max);
  b.delta_max = (alpha / N) * bracket;
  b.alpha2 = N * (3.0 - 2.0 * std::exp(b.epsilon)) / (4.0 * bracket);
  b.phi_min_prime = 0.5 * (1.0 - std::exp(b.epsilon));
  b.phi_max_prime = 0.5 * (1.0 - std::exp(-b.epsilon));
  return b;
}

std::optional<double> fixed_point(const DistState& s, double alpha, int N) {
  const UpdateCoeffs u = update_coeffs(s, alpha, N);
  if (u.m == 1.0) return std::nullopt;  // alpha = 0: c/(1-m) is 0/0
  return u.c / (1.0 - u.m);
}

std::pair<double, double> envelopes(const DistState& s, int N) {
  const double eps = epsilon_of(N);
  const double d = -4.0 * s.mu * s.mu - 4.0 * s.sigma_sq + 2.0 * s.mu;
  return {0.5 * (1.0 - std::exp(d + eps)), 0.5 * (1.0 - std::exp(d - eps))};
}

ConvergenceInterval convergence_interval(int N, double alpha) {
  const BoundSet b = bounds(N, alpha);
  ConvergenceInterval ci;
  ci.lo = b.phi_min_prime - b.delta_max;
  ci.hi = b.phi_max_prime + b.delta_max;
  ci.proven = N >= 18;
  return ci;
}

std::pair<double, double> exp_approx_error(double x, int N) {
  if (!(std::abs(x) < 1.0)) {
    throw std::invalid_argument("exp_approx_error: need |x| < 1");
  }
  const double eta = (N - 1.0) * std::log1p(x) - static_cast<double>(N) * x;
  const double bound =
      (N - 1.0) * x * x / (2.0 * (1.0 - std::abs(x))) + std::abs(x);
  if (std::abs(eta) > bound) {
    throw std::logic_error("exp_approx_error: bound violated");
  }
  return {eta, bound};
}

AffineTrajectory variable_affine_iterate(
    const std::function<double(double)>& a_fn,
    const std::function<double(double)>& b_fn, double x0, int steps) {
  if (steps < 0) throw std::invalid_argument("variable_affine_iterate: steps");
  AffineTrajectory t;
  t.x.reserve(static_cast<std::size_t>(steps) + 1);
  t.x.push_back(x0);
  for (int k = 0; k < steps; ++k) {
    const double xk = t.x.back();
    const double ak = a_fn(xk);
    const double bk = b_fn(xk);
    t.a.push_back(ak);
    t.b.push_back(bk);
    t.fp.push_back(ak == 1.0 ? xk : bk / (1.0 - ak));
    t.x.push_back(ak * xk + bk);
  }
  if (t.fp.empty()) {
    t.env_lo = t.env_hi = x0;
  } else {
    t.env_lo = *std::min_element(t.fp.begin(), t.fp.end());
    t.env_hi = *std::max_element(t.fp.begin(), t.fp.end());
  }
  t.dist.reserve(t.x.size());
  for (double x : t.x) t.dist.push_back(interval_distance(x, t.env_lo, t.env_hi));
  for (int k = 0; k < steps; ++k) {
    if (t.a[k] > 0.0 && t.a[k] < 1.0 &&
        t.dist[k + 1] > t.a[k] * t.dist[k] + 1e-12) {
      t.contraction_ok = false;
      t.first_violation = k;
      break;
    }
  }
  return t;
}

IntersectionBounds intersection_bounds_check(
    const std::function<double(double)>& f, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("intersection_bounds_check: a<b");
  const double fa = f(a);
  const double fb = f(b);
  const double scale = std::max({1.0, std::abs(fa), std::abs(fb)});
  // Monotonicity spot check on a fixed grid.
  const int kGrid = 256;
  double prev = fa;
  for (int i = 1; i <= kGrid; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / kGrid;
    const double fx = f(x);
    if (fx > prev + 1e-12 * scale) {
      throw std::invalid_argument(
          "intersection_bounds_check: f not decreasing on [a,b]");
    }
    prev = fx;
  }
  IntersectionBounds out;
  out.lo = std::max(fb, a);
  out.hi = std::min(fa, b);
  // g(x) = f(x) - x is strictly decreasing; a sign change brackets the root.
  if (fa - a >= 0.0 && fb - b <= 0.0) {
    double lo = a, hi = b;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) - mid >= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.root = 0.5 * (lo + hi);
    out.root_within =
        *out.root >= out.lo - 1e-9 && *out.root <= out.hi + 1e-9;
  }
  return out;
}

InvarianceReport invariance_report(int N, double alpha) {
  InvarianceReport r;
  r.N = N;
  r.alpha = alpha;
  r.epsilon = epsilon_of(N);
  // Global containment: worst case of zeta - xi over the whole domain is 1/4
  // (at mu = 1/4, sigma^2 -> 0), so the lowest envelope value overall is:
  r.envelope_lo_worst = 0.5 * (1.0 - std::exp(0.25 + r.epsilon));
  r.global_ok = r.envelope_lo_worst >= -0.25;
  r.phi_min_prime = 0.5 * (1.0 - std::exp(r.epsilon));
  r.phi_max_prime = 0.5 * (1.0 - std::exp(-r.epsilon));
  r.interval_ok = r.phi_min_prime > -0.25 && r.phi_max_prime < 0.25;
  // Buffer zone: envelope at the domain corner mu = -1/4, sigma^2 = 0, where
  // zeta - xi = -3/4.
  r.envelope_lo_buffer = 0.5 * (1.0 - std::exp(-0.75 + r.epsilon));
  r.buffer_ok = r.envelope_lo_buffer > -0.25;
  return r;
}

void write_trajectory_csv(const std::vector<DistState>& traj, double alpha,
                          int N, std::ostream& os) {
  os << std::setprecision(17);
  os << "k,mu,sigma_sq,m,c,fp\n";
  for (const DistState& s : traj) {
    const UpdateCoeffs u = update_coeffs(s, alpha, N);
    os << s.k << ',' << s.mu << ',' << s.sigma_sq << ',' << u.m << ',' << u.c
       << ',';
    if (const auto fp = fixed_point(s, alpha, N)) os << *fp;
    os << '\n';
  }
}

void write_bounds_csv(const std::vector<BoundSet>& rows, std::ostream& os) {
  os << std::setprecision(17);
  os << "N,alpha0,alpha1,alpha2,epsilon,phi_min,phi_max,delta_max\n";
  for (const BoundSet& b : rows) {
    os << b.N << ',' << b.alpha0 << ',' << b.alpha1 << ',' << b.alpha2 << ','
       << b.epsilon << ',' << b.phi_min_prime << ',' << b.phi_max_prime << ','
       << b.delta_max << '\n';
  }
}

}  // namespace parity
