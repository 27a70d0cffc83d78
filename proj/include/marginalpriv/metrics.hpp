#ifndef MARGINALPRIV_METRICS_HPP
#define MARGINALPRIV_METRICS_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace marginalpriv {

// Average-case error: sum_j |a_j - b_j|.
template <typename DerivedA, typename DerivedB>
double l1_error(const Eigen::MatrixBase<DerivedA>& a,
                const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("l1_error: dimension mismatch");
  return (a.derived() - b.derived()).template lpNorm<1>();
}

// Worst-case error: max_j |a_j - b_j|.
template <typename DerivedA, typename DerivedB>
double linf_error(const Eigen::MatrixBase<DerivedA>& a,
                  const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("linf_error: dimension mismatch");
  return (a.derived() - b.derived()).template lpNorm<Eigen::Infinity>();
}

// Coordinatewise clamp into [-1, 1]; post-processing applied to every
// mechanism output.
template <typename Derived>
Eigen::VectorXd clamp_unit(const Eigen::MatrixBase<Derived>& v) {
  return v.derived().cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace marginalpriv

#endif  // MARGINALPRIV_METRICS_HPP
