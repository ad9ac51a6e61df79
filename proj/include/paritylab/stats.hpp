#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "paritylab/gradients.hpp"

namespace parity {

/// Sample moments of the two weight families, split by oracle target.
/// An empty family (p_w in {0,1}) has count 0 and NaN moments ("absent").
struct FamilyMoments {
  double mu0 = 0.0;
  double sig0_sq = 0.0;
  double mu1 = 0.0;
  double sig1_sq = 0.0;
  long n0 = 0;
  long n1 = 0;

  bool has0() const { return n0 > 0; }
  bool has1() const { return n1 > 0; }
};

/// Splits the entries of W by the binary oracle target at the same position
/// and returns each family's mean and second central moment.
FamilyMoments family_moments(const Eigen::Ref<const Eigen::MatrixXd>& W,
                             const Eigen::Ref<const Eigen::MatrixXi>& oracle);

/// Standard normal quantile (inverse CDF), rational approximation refined by
/// one Halley step with erfc; absolute error is at machine-precision level.
double normal_quantile(double p);

/// Gaussianity proxy: Pearson correlation between the order statistics of
/// the samples and standard normal quantiles at positions (i-0.5)/n.
struct QQReport {
  double correlation = 0.0;
  long sample_count = 0;
};
QQReport qq_gaussian(std::vector<double> samples);

/// CSV export `theoretical_q,empirical_q` of the standardized Q-Q pairs.
void write_qq_csv(std::vector<double> samples, std::ostream& os);

/// Monte-Carlo estimate of the expected XOR-unit gradient over fresh
/// Bernoulli(p_e) batches: `reps` batches of `rows_per_rep` samples each;
/// standard errors come from the spread of the per-batch gradients.
struct McGradient {
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
  long reps = 0;
};
McGradient mc_expected_gradient(const Eigen::VectorXd& w,
                                const Eigen::VectorXd& w_true, double p_e,
                                int reps, std::uint64_t seed,
                                int rows_per_rep = 100);

/// Monte-Carlo estimate of the mixed-weight expected gradient component:
/// draws the other N-1 (target, weight) pairs i.i.d. from the family mixture
/// and averages the analytic input-expectation at each draw.
struct McScalar {
  double mean = 0.0;
  double se = 0.0;
  long reps = 0;
};
McScalar mc_expected_grad_gaussian(const GaussianFamilyParams& fam, double p_e,
                                   int N, double w_i, double w_true_i,
                                   int reps, std::uint64_t seed);

}  // namespace parity
