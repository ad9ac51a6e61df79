#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>

#include "paritylab/numeric.hpp"

namespace parity {

namespace detail {

template <typename DX, typename DW>
void require_batch_dims(const Eigen::MatrixBase<DX>& X,
                        const Eigen::MatrixBase<DW>& w, const char* where) {
  if (X.cols() != w.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
}

// Products of all entries except one, computed with prefix/suffix partial
// products so that zero entries never require division.
template <typename Vec>
Vec exclude_one_products(const Vec& v) {
  const Eigen::Index n = v.size();
  Vec pre(n), suf(n);
  typename Vec::Scalar acc{1};
  for (Eigen::Index i = 0; i < n; ++i) {
    pre(i) = acc;
    acc *= v(i);
  }
  acc = typename Vec::Scalar{1};
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    suf(i) = acc;
    acc *= v(i);
  }
  return pre.cwiseProduct(suf);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Empirical risks. Rows of X (or B) are samples; the oracle shares the inputs
// and applies w_true.
// ---------------------------------------------------------------------------

/// Mean squared error of the weighted sum against its oracle.
template <typename DX, typename DW, typename DT>
double sum_risk(const Eigen::MatrixBase<DX>& X, const Eigen::MatrixBase<DW>& w,
                const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(X, w, "sum_risk");
  detail::require_batch_dims(X, w_true, "sum_risk");
  return (X * w - X * w_true).squaredNorm() / static_cast<double>(X.rows());
}

/// Mean squared error of the weighted product against its oracle.
template <typename DX, typename DW, typename DT>
double naive_product_risk(const Eigen::MatrixBase<DX>& X,
                          const Eigen::MatrixBase<DW>& w,
                          const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(X, w, "naive_product_risk");
  detail::require_batch_dims(X, w_true, "naive_product_risk");
  const Eigen::Index M = X.rows(), N = X.cols();
  double acc = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    double pw = 1.0, pt = 1.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      pw *= w(i) * X(m, i);
      pt *= w_true(i) * X(m, i);
    }
    acc += (pw - pt) * (pw - pt);
  }
  return acc / static_cast<double>(M);
}

/// Neutral-element product risk on z-inputs: factors are a_i = w_i z_i + 1.
template <typename DZ, typename DW, typename DT>
double ne_product_risk_z(const Eigen::MatrixBase<DZ>& Z,
                         const Eigen::MatrixBase<DW>& w,
                         const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(Z, w, "ne_product_risk_z");
  detail::require_batch_dims(Z, w_true, "ne_product_risk_z");
  const Eigen::Index M = Z.rows(), N = Z.cols();
  double acc = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    double pa = 1.0, pt = 1.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      pa *= w(i) * Z(m, i) + 1.0;
      pt *= w_true(i) * Z(m, i) + 1.0;
    }
    acc += (pa - pt) * (pa - pt);
  }
  return acc / static_cast<double>(M);
}

/// Neutral-element product risk on x-inputs (z = x - 1 internally).
template <typename DX, typename DW, typename DT>
double ne_product_risk(const Eigen::MatrixBase<DX>& X,
                       const Eigen::MatrixBase<DW>& w,
                       const Eigen::MatrixBase<DT>& w_true) {
  return ne_product_risk_z((X.array() - 1.0).matrix(), w, w_true);
}

/// Parity-unit risk on binary inputs (z = -2b internally); equals the
/// neutral-element risk on those z divided by 4.
template <typename DB, typename DW, typename DT>
double xor_risk(const Eigen::MatrixBase<DB>& B, const Eigen::MatrixBase<DW>& w,
                const Eigen::MatrixBase<DT>& w_true) {
  return ne_product_risk_z((B.template cast<double>().array() * -2.0).matrix(),
                           w, w_true) /
         4.0;
}

// ---------------------------------------------------------------------------
// Analytic gradients and Hessians of the empirical risks.
// ---------------------------------------------------------------------------

/// Gradient of sum_risk: (2/M) X^T X (w - w_true).
template <typename DX, typename DW, typename DT>
Eigen::VectorXd sum_grad(const Eigen::MatrixBase<DX>& X,
                         const Eigen::MatrixBase<DW>& w,
                         const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(X, w, "sum_grad");
  detail::require_batch_dims(X, w_true, "sum_grad");
  const double scale = 2.0 / static_cast<double>(X.rows());
  return scale * (X.transpose() * (X * (w - w_true)));
}

/// Mean over rows of prod_i x_{m,i}^2 (the D factor of the naive product).
template <typename DX>
double naive_product_d_factor(const Eigen::MatrixBase<DX>& X) {
  const Eigen::Index M = X.rows(), N = X.cols();
  double acc = 0.0;
  for (Eigen::Index m = 0; m < M; ++m) {
    double p = 1.0;
    for (Eigen::Index i = 0; i < N; ++i) p *= X(m, i) * X(m, i);
    acc += p;
  }
  return acc / static_cast<double>(M);
}

/// Gradient of naive_product_risk: component j is
///   2 D (prod_{i!=j} w_i) (prod w - prod w_true).
template <typename DX, typename DW, typename DT>
Eigen::VectorXd naive_product_grad(const Eigen::MatrixBase<DX>& X,
                                   const Eigen::MatrixBase<DW>& w,
                                   const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(X, w, "naive_product_grad");
  detail::require_batch_dims(X, w_true, "naive_product_grad");
  const double D = naive_product_d_factor(X);
  const Eigen::VectorXd wv = w.template cast<double>();
  const double pw = wv.prod();
  const double pt = w_true.template cast<double>().prod();
  const Eigen::VectorXd excl = detail::exclude_one_products(wv);
  return (2.0 * D * (pw - pt)) * excl;
}

/// Hessian of naive_product_risk: diagonal 2 D (prod_{i!=j} w_i)^2,
/// off-diagonal 2 D (prod_{i!=j,l} w_i) (2 prod w - prod w_true).
/// Exclude-two products use direct O(N) loops; Hessians are only formed at
/// small N.
template <typename DX, typename DW, typename DT>
Eigen::MatrixXd naive_product_hessian(const Eigen::MatrixBase<DX>& X,
                                      const Eigen::MatrixBase<DW>& w,
                                      const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(X, w, "naive_product_hessian");
  detail::require_batch_dims(X, w_true, "naive_product_hessian");
  const Eigen::Index N = w.size();
  const double D = naive_product_d_factor(X);
  const Eigen::VectorXd wv = w.template cast<double>();
  const double pw = wv.prod();
  const double pt = w_true.template cast<double>().prod();
  const Eigen::VectorXd excl = detail::exclude_one_products(wv);
  Eigen::MatrixXd H(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    H(j, j) = 2.0 * D * excl(j) * excl(j);
    for (Eigen::Index l = j + 1; l < N; ++l) {
      double p2 = 1.0;
      for (Eigen::Index i = 0; i < N; ++i) {
        if (i != j && i != l) p2 *= wv(i);
      }
      const double hjl = 2.0 * D * p2 * (2.0 * pw - pt);
      H(j, l) = hjl;
      H(l, j) = hjl;
    }
  }
  return H;
}

/// Gradient of ne_product_risk_z: component j is
///   (2/M) sum_m z_{m,j} (prod_{i!=j} a_{m,i}) (prod a_m - prod a_true_m).
template <typename DZ, typename DW, typename DT>
Eigen::VectorXd ne_product_grad_z(const Eigen::MatrixBase<DZ>& Z,
                                  const Eigen::MatrixBase<DW>& w,
                                  const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(Z, w, "ne_product_grad_z");
  detail::require_batch_dims(Z, w_true, "ne_product_grad_z");
  const Eigen::Index M = Z.rows(), N = Z.cols();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd a(N);
  for (Eigen::Index m = 0; m < M; ++m) {
    double pt = 1.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      a(i) = w(i) * Z(m, i) + 1.0;
      pt *= w_true(i) * Z(m, i) + 1.0;
    }
    const Eigen::VectorXd excl = detail::exclude_one_products(a);
    const double pa = a(0) * excl(0);
    const double err = pa - pt;
    for (Eigen::Index j = 0; j < N; ++j) g(j) += Z(m, j) * excl(j) * err;
  }
  return (2.0 / static_cast<double>(M)) * g;
}

/// Gradient of ne_product_risk on x-inputs.
template <typename DX, typename DW, typename DT>
Eigen::VectorXd ne_product_grad(const Eigen::MatrixBase<DX>& X,
                                const Eigen::MatrixBase<DW>& w,
                                const Eigen::MatrixBase<DT>& w_true) {
  return ne_product_grad_z((X.array() - 1.0).matrix(), w, w_true);
}

/// Hessian of ne_product_risk_z: diagonal (2/M) sum_m z_j^2 (prod_{i!=j} a)^2,
/// off-diagonal (2/M) sum_m z_j z_l p2 (2 a_j a_l p2 - prod a_true) with
/// p2 = prod_{i!=j,l} a.
template <typename DZ, typename DW, typename DT>
Eigen::MatrixXd ne_product_hessian_z(const Eigen::MatrixBase<DZ>& Z,
                                     const Eigen::MatrixBase<DW>& w,
                                     const Eigen::MatrixBase<DT>& w_true) {
  detail::require_batch_dims(Z, w, "ne_product_hessian_z");
  detail::require_batch_dims(Z, w_true, "ne_product_hessian_z");
  const Eigen::Index M = Z.rows(), N = Z.cols();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
  Eigen::VectorXd a(N);
  for (Eigen::Index m = 0; m < M; ++m) {
    double pt = 1.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      a(i) = w(i) * Z(m, i) + 1.0;
      pt *= w_true(i) * Z(m, i) + 1.0;
    }
    const Eigen::VectorXd excl = detail::exclude_one_products(a);
    for (Eigen::Index j = 0; j < N; ++j) {
      H(j, j) += Z(m, j) * Z(m, j) * excl(j) * excl(j);
      for (Eigen::Index l = j + 1; l < N; ++l) {
        double p2 = 1.0;
        for (Eigen::Index i = 0; i < N; ++i) {
          if (i != j && i != l) p2 *= a(i);
        }
        const double t =
            Z(m, j) * Z(m, l) * p2 * (2.0 * a(j) * a(l) * p2 - pt);
        H(j, l) += t;
        H(l, j) += t;
      }
    }
  }
  return (2.0 / static_cast<double>(M)) * H;
}

/// Hessian of ne_product_risk on x-inputs.
template <typename DX, typename DW, typename DT>
Eigen::MatrixXd ne_product_hessian(const Eigen::MatrixBase<DX>& X,
                                   const Eigen::MatrixBase<DW>& w,
                                   const Eigen::MatrixBase<DT>& w_true) {
  return ne_product_hessian_z((X.array() - 1.0).matrix(), w, w_true);
}

/// Gradient of xor_risk on binary inputs: the neutral-element gradient at
/// z = -2b, scaled by 1/4.
template <typename DB, typename DW, typename DT>
Eigen::VectorXd xor_grad(const Eigen::MatrixBase<DB>& B,
                         const Eigen::MatrixBase<DW>& w,
                         const Eigen::MatrixBase<DT>& w_true) {
  return ne_product_grad_z(
             (B.template cast<double>().array() * -2.0).matrix(), w, w_true) /
         4.0;
}

/// Hessian of xor_risk: neutral-element Hessian at z = -2b, scaled by 1/4.
template <typename DB, typename DW, typename DT>
Eigen::MatrixXd xor_hessian(const Eigen::MatrixBase<DB>& B,
                            const Eigen::MatrixBase<DW>& w,
                            const Eigen::MatrixBase<DT>& w_true) {
  return ne_product_hessian_z(
             (B.template cast<double>().array() * -2.0).matrix(), w, w_true) /
         4.0;
}

// ---------------------------------------------------------------------------
// Expected gradients under Bernoulli(p_e) inputs.
// ---------------------------------------------------------------------------

/// Expectation of xor_grad over inputs with i.i.d. Bernoulli(p_e) bits:
/// component j is
///   p_e [ (2w_j - 1) prod_{i!=j} (4 p_e w_i^2 - 4 p_e w_i + 1)
///       - (2t_j - 1) prod_{i!=j} (4 p_e w_i t_i - 2 p_e (w_i + t_i) + 1) ]
/// with t = w_true.
template <typename DW, typename DT>
Eigen::VectorXd expected_xor_grad_bernoulli(const Eigen::MatrixBase<DW>& w,
                                            const Eigen::MatrixBase<DT>& w_true,
                                            double p_e) {
  if (!(p_e > 0.0 && p_e < 1.0)) {
    throw std::invalid_argument("expected_xor_grad_bernoulli: p_e not in (0,1)");
  }
  if (w.size() != w_true.size()) {
    throw std::invalid_argument("expected_xor_grad_bernoulli: length mismatch");
  }
  const Eigen::Index N = w.size();
  Eigen::VectorXd f1(N), f2(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double wi = w(i), ti = w_true(i);
    f1(i) = 4.0 * p_e * wi * wi - 4.0 * p_e * wi + 1.0;
    f2(i) = 4.0 * p_e * wi * ti - 2.0 * p_e * (wi + ti) + 1.0;
  }
  const Eigen::VectorXd e1 = detail::exclude_one_products(f1);
  const Eigen::VectorXd e2 = detail::exclude_one_products(f2);
  Eigen::VectorXd g(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    g(j) = p_e * ((2.0 * w(j) - 1.0) * e1(j) -
                  (2.0 * w_true(j) - 1.0) * e2(j));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Expected gradient when weights themselves are random: each weight is drawn
// from one of two Gaussian families according to its oracle target.
// ---------------------------------------------------------------------------

/// Two Gaussian weight families: family 0 holds weights whose oracle target
/// is 0 (moments mu0, sigma0_sq), family 1 those with target 1; p_w is the
/// fraction of targets equal to 1.
struct GaussianFamilyParams {
  double mu0 = 0.0;
  double sigma0_sq = 0.0;
  double mu1 = 0.0;
  double sigma1_sq = 0.0;
  double p_w = 0.0;
};

/// The four per-coordinate expectation factors of the mixed-weight gradient.
struct ABTerms {
  double A0 = 0.0;
  double A1 = 0.0;
  double B0 = 0.0;
  double B1 = 0.0;
};

/// A/B factors at sparsity p_e:
///   A0 = 4 p_e (mu0^2 + sigma0^2) - 4 p_e mu0 + 1   (and A1 analogously),
///   B0 = 1 - 2 p_e mu0,  B1 = 1 - 2 p_e (1 - mu1).
inline ABTerms ab_terms(const GaussianFamilyParams& fam, double p_e) {
  if (fam.sigma0_sq < 0.0 || fam.sigma1_sq < 0.0) {
    throw std::invalid_argument("ab_terms: negative variance");
  }
  if (fam.p_w < 0.0 || fam.p_w > 1.0) {
    throw std::invalid_argument("ab_terms: p_w outside [0,1]");
  }
  ABTerms t;
  t.A0 = 4.0 * p_e * (fam.mu0 * fam.mu0 + fam.sigma0_sq) - 4.0 * p_e * fam.mu0 +
         1.0;
  t.A1 = 4.0 * p_e * (fam.mu1 * fam.mu1 + fam.sigma1_sq) - 4.0 * p_e * fam.mu1 +
         1.0;
  t.B0 = 1.0 - 2.0 * p_e * fam.mu0;
  t.B1 = 1.0 - 2.0 * p_e * (1.0 - fam.mu1);
  return t;
}

/// Expected gradient component for weight i when the other N-1 weights are
/// drawn from the two families:
///   p_e [ (2 w_i - 1) ((1-q) A0 + q A1)^{N-1}
///       - (2 t_i - 1) ((1-q) B0 + q B1)^{N-1} ]
/// where q is the fraction of targets equal to 1 among the other weights.
/// By default q = p_w (large-N simplification); exact_leave_one_out instead
/// uses q = (p_w N - t_i)/(N - 1).
inline double expected_grad_gaussian(const GaussianFamilyParams& fam,
                                     double p_e, int N, double w_i,
                                     double w_true_i,
                                     bool exact_leave_one_out = false) {
  if (N < 2) throw std::invalid_argument("expected_grad_gaussian: N < 2");
  const ABTerms t = ab_terms(fam, p_e);
  const double q = exact_leave_one_out
                       ? (fam.p_w * N - w_true_i) / (N - 1.0)
                       : fam.p_w;
  const double baseA = (1.0 - q) * t.A0 + q * t.A1;
  const double baseB = (1.0 - q) * t.B0 + q * t.B1;
  return p_e * ((2.0 * w_i - 1.0) * pow_n(baseA, N - 1) -
                (2.0 * w_true_i - 1.0) * pow_n(baseB, N - 1));
}

/// Magnitude of the expected gradient at the all-1/2 weight state:
/// p_e (1 - p_e)^{N-1}.
inline double grad_magnitude_vs_pe(double p_e, int N) {
  if (N < 1) throw std::invalid_argument("grad_magnitude_vs_pe: N < 1");
  return p_e * pow_n(1.0 - p_e, N - 1);
}

/// Sparsity maximizing grad_magnitude_vs_pe: 1/N.
inline double optimal_pe(int N) {
  if (N < 1) throw std::invalid_argument("optimal_pe: N < 1");
  return 1.0 / static_cast<double>(N);
}

// ---------------------------------------------------------------------------
// Convexity witness.
// ---------------------------------------------------------------------------

/// Returns a direction q with q^T H q < 0 if the minimum eigenvalue of the
/// symmetric matrix H falls below `tol` (round-off guard), otherwise nothing.
inline std::optional<Eigen::VectorXd> psd_witness(
    const Eigen::Ref<const Eigen::MatrixXd>& H, double tol = -1e-10) {
  if (H.rows() != H.cols()) {
    throw std::invalid_argument("psd_witness: matrix not square");
  }
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("psd_witness: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("psd_witness: eigendecomposition failed");
  }
  if (es.eigenvalues()(0) < tol) {
    return es.eigenvectors().col(0);
  }
  return std::nullopt;
}

}  // namespace parity
