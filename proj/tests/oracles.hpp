// Shared helpers for the test binaries: finite differences, error metrics,
// and small numeric utilities independent of the library under test.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace testutil {

/// Central-difference gradient of a scalar function of a weight vector.
template <typename F>
Eigen::VectorXd fd_grad(const F& f, Eigen::VectorXd w, double h = 1e-5) {
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

/// Central-difference Jacobian of a vector function (gradient), giving the
/// Hessian when the function is an analytic gradient.
template <typename F>
Eigen::MatrixXd fd_jacobian(const F& grad_fn, Eigen::VectorXd w,
                            double h = 1e-5) {
  const Eigen::VectorXd g0 = grad_fn(w);
  Eigen::MatrixXd J(g0.size(), w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double w0 = w(i);
    w(i) = w0 + h;
    const Eigen::VectorXd gp = grad_fn(w);
    w(i) = w0 - h;
    const Eigen::VectorXd gm = grad_fn(w);
    w(i) = w0;
    J.col(i) = (gp - gm) / (2.0 * h);
  }
  return J;
}

/// Max-norm relative error with an absolute floor on the denominator.
inline double max_rel_err(const Eigen::MatrixXd& got,
                          const Eigen::MatrixXd& want, double floor = 1.0) {
  const double scale = std::max(floor, want.cwiseAbs().maxCoeff());
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

inline double rel_err(double got, double want, double floor = 1.0) {
  return std::abs(got - want) / std::max(floor, std::abs(want));
}

/// Index of the largest value (first occurrence).
inline std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

/// Plain bisection for continuous g with a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& g, double lo,
                     double hi, int iters = 200) {
  double flo = g(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = g(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace testutil
