#include "paritylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "paritylab/data.hpp"
#include "paritylab/rng.hpp"

namespace parity {

FamilyMoments family_moments(const Eigen::Ref<const Eigen::MatrixXd>& W,
                             const Eigen::Ref<const Eigen::MatrixXi>& oracle) {
  if (W.rows() != oracle.rows() || W.cols() != oracle.cols()) {
    throw std::invalid_argument("family_moments: shape mismatch");
  }
  double s0 = 0.0, s1 = 0.0;
  long n0 = 0, n1 = 0;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      if (oracle(i, j) == 0) {
        s0 += W(i, j);
        ++n0;
      } else {
        s1 += W(i, j);
        ++n1;
      }
    }
  }
  FamilyMoments fm;
  fm.n0 = n0;
  fm.n1 = n1;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  fm.mu0 = n0 > 0 ? s0 / n0 : nan;
  fm.mu1 = n1 > 0 ? s1 / n1 : nan;
  double v0 = 0.0, v1 = 0.0;
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      if (oracle(i, j) == 0) {
        const double d = W(i, j) - fm.mu0;
        v0 += d * d;
      } else {
        const double d = W(i, j) - fm.mu1;
        v1 += d * d;
      }
    }
  }
  fm.sig0_sq = n0 > 0 ? v0 / n0 : nan;
  fm.sig1_sq = n1 > 0 ? v1 / n1 : nan;
  return fm;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p outside (0,1)");
  }
  // Rational approximation (relative error ~1e-9 before refinement).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF via erfc.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) *
                   std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

// Sorted standardized samples paired with normal quantiles at (i-0.5)/n.
struct QQPairs {
  std::vector<double> theoretical;
  std::vector<double> empirical;
};

QQPairs qq_pairs(std::vector<double> samples) {
  const auto n = static_cast<long>(samples.size());
  if (n < 20) throw std::invalid_argument("qq_gaussian: need >= 20 samples");
  std::sort(samples.begin(), samples.end());
  if (samples.front() == samples.back()) {
    throw std::invalid_argument("qq_gaussian: zero variance");
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (sd == 0.0) throw std::invalid_argument("qq_gaussian: zero variance");
  QQPairs qq;
  qq.theoretical.resize(n);
  qq.empirical.resize(n);
  for (long i = 0; i < n; ++i) {
    qq.theoretical[i] = normal_quantile((i + 0.5) / static_cast<double>(n));
    qq.empirical[i] = (samples[i] - mean) / sd;
  }
  return qq;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

QQReport qq_gaussian(std::vector<double> samples) {
  QQReport r;
  r.sample_count = static_cast<long>(samples.size());
  const QQPairs qq = qq_pairs(std::move(samples));
  r.correlation = pearson(qq.theoretical, qq.empirical);
  return r;
}

void write_qq_csv(std::vector<double> samples, std::ostream& os) {
  const QQPairs qq = qq_pairs(std::move(samples));
  os << std::setprecision(17);
  os << "theoretical_q,empirical_q\n";
  for (std::size_t i = 0; i < qq.theoretical.size(); ++i) {
    os << qq.theoretical[i] << ',' << qq.empirical[i] << '\n';
  }
}

McGradient mc_expected_gradient(const Eigen::VectorXd& w,
                                const Eigen::VectorXd& w_true, double p_e,
                                int reps, std::uint64_t seed,
                                int rows_per_rep) {
  if (reps < 100) throw std::invalid_argument("mc_expected_gradient: reps<100");
  if (rows_per_rep < 1) {
    throw std::invalid_argument("mc_expected_gradient: rows_per_rep<1");
  }
  const auto N = static_cast<int>(w.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(N);
  for (int r = 0; r < reps; ++r) {
    Xoshiro256pp g = make_stream(seed, StreamTag::kMcRep, 0, r);
    const SparseBatch batch = sample_bernoulli_batch(N, rows_per_rep, p_e, g);
    const Eigen::VectorXd grad = xor_grad(batch.dense(), w, w_true);
    // Welford update, component-wise.
    const Eigen::VectorXd delta = grad - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta.cwiseProduct(grad - mean);
  }
  McGradient out;
  out.mean = mean;
  out.se = (m2 / (static_cast<double>(reps - 1) * reps)).cwiseSqrt();
  out.reps = reps;
  return out;
}

McScalar mc_expected_grad_gaussian(const GaussianFamilyParams& fam, double p_e,
                                   int N, double w_i, double w_true_i,
                                   int reps, std::uint64_t seed) {
  if (reps < 100) {
    throw std::invalid_argument("mc_expected_grad_gaussian: reps<100");
  }
  if (N < 2) throw std::invalid_argument("mc_expected_grad_gaussian: N<2");
  const double sd0 = std::sqrt(fam.sigma0_sq);
  const double sd1 = std::sqrt(fam.sigma1_sq);
  Eigen::VectorXd w(N), t(N);
  double mean = 0.0, m2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    Xoshiro256pp g = make_stream(seed, StreamTag::kMcRep, 1, r);
    w(0) = w_i;
    t(0) = w_true_i;
    for (int j = 1; j < N; ++j) {
      const bool one = uniform01(g) < fam.p_w;
      t(j) = one ? 1.0 : 0.0;
      w(j) = one ? fam.mu1 + sd1 * normal01(g) : fam.mu0 + sd0 * normal01(g);
    }
    const double val = expected_xor_grad_bernoulli(w, t, p_e)(0);
    const double delta = val - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (val - mean);
  }
  McScalar out;
  out.mean = mean;
  out.se = std::sqrt(m2 / (static_cast<double>(reps - 1) * reps));
  out.reps = reps;
  return out;
}

}  // namespace parity
