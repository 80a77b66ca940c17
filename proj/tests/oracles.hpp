#pragma once

// Reference computations that share no code path with the library.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "locid/linop.hpp"

namespace oracle {

// Singular values of T: L2(w_d) -> L2(w_c) with action M, as square roots of the
// eigenvalues of W_d^{-1} M' W_c M from a general (nonsymmetric) eigensolver.
inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& M, const Eigen::VectorXd& wd,
                                       const Eigen::VectorXd& wc) {
  const Eigen::MatrixXd A = wd.cwiseInverse().asDiagonal() * M.transpose() * wc.asDiagonal() * M;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  std::vector<double> mu;
  for (Eigen::Index i = 0; i < A.rows(); ++i) mu.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  mu.resize(static_cast<std::size_t>(std::min(M.rows(), M.cols())));
  return Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
}

inline Eigen::VectorXd singular_values(const locid::LinearOperator& op) {
  return singular_values(op.action(), op.domain()->weights(), op.codomain()->weights());
}

// Squared Hilbert-Schmidt norm as the double sum over the kernel.
inline double hs_squared(const Eigen::MatrixXd& K, const Eigen::VectorXd& wd, const Eigen::VectorXd& wc) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < K.rows(); ++i)
    for (Eigen::Index j = 0; j < K.cols(); ++j) s += wc(i) * wd(j) * K(i, j) * K(i, j);
  return s;
}

struct Leading {
  double rho = 0.0;
  double second = 0.0;      // modulus of the next eigenvalue
  Eigen::VectorXd vector;   // positive, unit norm under `w`
};

// Leading eigenpair of the matrix M from a full dense eigendecomposition.
inline Leading leading_eigen(const Eigen::MatrixXd& M, const Eigen::VectorXd& w) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
  const auto& ev = es.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (std::abs(ev(i)) > std::abs(ev(best))) best = i;
  Leading out;
  out.rho = ev(best).real();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (i != best) out.second = std::max(out.second, std::abs(ev(i)));
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  out.vector = v / std::sqrt(v.cwiseProduct(v).dot(w));
  return out;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oracle
