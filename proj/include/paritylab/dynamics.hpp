#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace parity {

// State domain of the two-moment recurrence (the region in which the error
// bounds below are valid): mu in [-1/4, 1/2], sigma_sq in (0, 1/4].
inline constexpr double kDomainMuMin = -0.25;
inline constexpr double kDomainMuMax = 0.5;
inline constexpr double kDomainSigSqMax = 0.25;

/// One symmetric Gaussian weight family at step k, tracked by two moments.
struct DistState {
  double mu = 0.0;
  double sigma_sq = 0.0;
  long k = 0;
};

/// Coefficients of the affine mean/variance update at one state,
/// with the exponents of the exponential forms of the two power terms:
/// xi = 4(mu^2 + sigma^2 - mu), zeta = -2 mu.
struct UpdateCoeffs {
  double m = 0.0;
  double c = 0.0;
  double xi = 0.0;
  double zeta = 0.0;
};

/// All N- and alpha-dependent theoretical quantities.
struct BoundSet {
  int N = 0;
  double alpha = 0.0;
  double eta_xi_max = 0.0;           // 153/(32N-72)
  double eta_zeta_max = 0.0;         // 3/(2N)
  double eta_xi_max_zero_var = 0.0;  // 65/(32N-40)
  double epsilon = 0.0;              // (402N-216)/(2N(32N-72))
  double alpha0 = 0.0;               // variance decay: |m| < 1
  double alpha1 = 0.0;               // monotone mean: 0 < m < 1
  double alpha2 = 0.0;               // convergence-interval containment
  double delta_max = 0.0;            // uniform bound on one mean step
  double phi_min_prime = 0.0;        // (1 - e^{+epsilon})/2
  double phi_max_prime = 0.0;        // (1 - e^{-epsilon})/2
};

/// Exact update coefficients at sparsity p_e = 1/N:
///   m = 1 - (2 alpha/N) A0^{N-1},  c = (alpha/N)[A0^{N-1} - B0^{N-1}]
/// with A0 = 4 p_e (mu^2 + sigma^2) - 4 p_e mu + 1 and B0 = 1 - 2 p_e mu.
/// c is the offset for the target-0 family; the target-1 family uses
/// (alpha/N)[A0^{N-1} + B0^{N-1}] (see family1_offset).
UpdateCoeffs update_coeffs(const DistState& state, double alpha, int N);

/// Offset of the target-1 family's mean update at the same state.
double family1_offset(const DistState& state, double alpha, int N);

/// One step of the affine map: mu' = m mu + c, sigma^2' = m^2 sigma^2.
DistState step_dist(const DistState& state, double alpha, int N);

/// Iterate step_dist `steps` times; returns the visited states including the
/// initial one (size steps+1).
std::vector<DistState> iterate_dist(const DistState& init, double alpha, int N,
                                    int steps);

/// All truncation-error bounds and learning-rate thresholds for (N, alpha).
/// Requires N > 2.
BoundSet bounds(int N, double alpha);

/// Instantaneous fixed point c/(1-m) of the mean update at `state`;
/// undefined (nullopt) when m = 1, i.e. alpha = 0.
std::optional<double> fixed_point(const DistState& state, double alpha, int N);

/// Envelope bounds on the instantaneous fixed point at `state`:
///   (1 - e^{(zeta-xi) +- epsilon(N)})/2  with  zeta - xi = -4mu^2-4sigma^2+2mu.
/// Returned as (lo, hi).
std::pair<double, double> envelopes(const DistState& state, int N);

/// Terminal region of the mean: [phi_min' - delta_max, phi_max' + delta_max].
/// `proven` is false for N < 18 (outside the regime where containment in
/// (-1/4, 1/4) is established).
struct ConvergenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool proven = false;
};
ConvergenceInterval convergence_interval(int N, double alpha);

/// Error of the exponential approximation (1+x)^{N-1} = e^{Nx} e^{eta}:
/// returns (eta, bound) with eta = (N-1)ln(1+x) - Nx and
/// bound = (N-1)x^2/(2(1-|x|)) + |x|. Requires |x| < 1.
std::pair<double, double> exp_approx_error(double x, int N);

/// Trajectory of x[k+1] = a(x[k]) x[k] + b(x[k]) with per-step diagnostics.
/// The envelope is the hull of the visited instantaneous fixed points
/// b/(1-a); dist[k] is the distance of x[k] to that envelope. Contraction
/// dist[k+1] <= a(x[k]) dist[k] is checked at every step with a in (0,1);
/// a violation is flagged, not thrown (it indicates the caller's a, b break
/// the hypotheses).
struct AffineTrajectory {
  std::vector<double> x;   // length steps+1
  std::vector<double> a;   // length steps
  std::vector<double> b;   // length steps
  std::vector<double> fp;  // instantaneous fixed points, length steps
  std::vector<double> dist;
  double env_lo = 0.0;
  double env_hi = 0.0;
  bool contraction_ok = true;
  int first_violation = -1;
};
AffineTrajectory variable_affine_iterate(
    const std::function<double(double)>& a_fn,
    const std::function<double(double)>& b_fn, double x0, int steps);

/// For f decreasing on [a,b]: any fixed point of f lies in
/// [max(f(b),a), min(f(a),b)]. Verifies monotonicity on a sampled grid
/// (error if violated) and locates the root of f(x)=x by bisection when the
/// existence condition holds.
struct IntersectionBounds {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> root;
  bool root_within = true;
};
IntersectionBounds intersection_bounds_check(
    const std::function<double(double)>& f, double a, double b);

/// Numerical check of the three regime conditions:
///  - global envelope containment (holds for N >= 43): lower envelope at the
///    domain-wide worst case zeta-xi = 1/4 stays >= -1/4;
///  - interval containment (N >= 18): phi' interval inside (-1/4, 1/4);
///  - buffer zone (N >= 8): lower envelope at mu = -1/4, sigma^2 = 0
///    stays > -1/4.
struct InvarianceReport {
  int N = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double envelope_lo_worst = 0.0;
  bool global_ok = false;
  double phi_min_prime = 0.0;
  double phi_max_prime = 0.0;
  bool interval_ok = false;
  double envelope_lo_buffer = 0.0;
  bool buffer_ok = false;
};
InvarianceReport invariance_report(int N, double alpha);

/// CSV export `k,mu,sigma_sq,m,c,fp` (fp empty when undefined).
void write_trajectory_csv(const std::vector<DistState>& traj, double alpha,
                          int N, std::ostream& os);

/// CSV export `N,alpha0,alpha1,alpha2,epsilon,phi_min,phi_max,delta_max`.
void write_bounds_csv(const std::vector<BoundSet>& rows, std::ostream& os);

}  // namespace parity
