#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace parity {

namespace detail {

template <typename DA, typename DB>
void require_same_length(const Eigen::MatrixBase<DA>& a,
                         const Eigen::MatrixBase<DB>& b, const char* where) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": length mismatch");
  }
}

}  // namespace detail

// Weighted sum: sum_i w_i x_i.
template <typename DW, typename DX>
typename DW::Scalar sum_forward(const Eigen::MatrixBase<DW>& w,
                                const Eigen::MatrixBase<DX>& x) {
  detail::require_same_length(w, x, "sum_forward");
  return w.cwiseProduct(x).sum();
}

// Weighted product: prod_i (w_i x_i). Any zero weight collapses the output.
template <typename DW, typename DX>
typename DW::Scalar naive_product_forward(const Eigen::MatrixBase<DW>& w,
                                          const Eigen::MatrixBase<DX>& x) {
  detail::require_same_length(w, x, "naive_product_forward");
  using Scalar = typename DW::Scalar;
  Scalar prod{1};
  for (Eigen::Index i = 0; i < w.size(); ++i) prod *= w(i) * x(i);
  return prod;
}

// Product with a neutral element: prod_i (w_i x_i + (1 - w_i)).
// A zero weight contributes a factor of one, so the unit selects inputs
// instead of collapsing on them.
template <typename DW, typename DX>
typename DW::Scalar ne_product_forward(const Eigen::MatrixBase<DW>& w,
                                       const Eigen::MatrixBase<DX>& x) {
  detail::require_same_length(w, x, "ne_product_forward");
  using Scalar = typename DW::Scalar;
  Scalar prod{1};
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    prod *= w(i) * x(i) + (Scalar{1} - w(i));
  }
  return prod;
}

// Parity unit on binary inputs b in {0,1}^N:
//   (1 - prod_i (w_i (1 - 2 b_i) + (1 - w_i))) / 2
// i.e. the neutral-element product on the bipolar form x = 1 - 2b, wrapped
// so that binary weights give exactly the GF(2) inner product (+)_i w_i b_i.
template <typename DW, typename DB>
typename DW::Scalar xor_forward(const Eigen::MatrixBase<DW>& w,
                                const Eigen::MatrixBase<DB>& b) {
  detail::require_same_length(w, b, "xor_forward");
  using Scalar = typename DW::Scalar;
  Scalar prod{1};
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const Scalar x = Scalar{1} - Scalar{2} * static_cast<Scalar>(b(i));
    prod *= w(i) * x + (Scalar{1} - w(i));
  }
  return (Scalar{1} - prod) / Scalar{2};
}

}  // namespace parity
