#include "locid/models/perron_frobenius.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "locid/error.hpp"
#include "locid/models/ccapm.hpp"

namespace locid {

namespace {

constexpr std::size_t kSpectrumLimit = 600;

struct Iteration {
  GridFunction g;
  double rho = 0.0;
  double residual = 0.0;
  double rate = 0.0;
  std::size_t iterations = 0;
};

Iteration power_iterate(const LinearOperator& T, double tol, std::size_t max_iter, const char* what) {
  GridFunction g = GridFunction::constant(T.domain(), 1.0);
  g *= 1.0 / norm(g);
  double prev = 0.0, rate = 0.0;
  for (std::size_t k = 1; k <= max_iter; ++k) {
    GridFunction h = T.apply(g);
    const double rho = norm(h);
    h *= 1.0 / rho;
    const double res = norm(h - g);
    if (prev > 0.0 && res > 0.0) rate = res / prev;
    prev = res;
    g = std::move(h);
    if (res <= tol) {
      const double r = norm(T.apply(g) * (1.0 / rho) - g);
      if (r <= tol) return {g, rho, r, rate, k};
    }
  }
  throw ConvergenceError(std::string("perron_frobenius: ") + what + " did not converge in " +
                         std::to_string(max_iter) + " iterations; last residual " + std::to_string(prev) +
                         ", estimated gap " + std::to_string(rate));
}

}  // namespace

EigenPair perron_frobenius(const LinearOperator& T, double tol, std::size_t max_iter) {
  if (!same_measure(T.domain(), T.codomain()))
    throw ShapeError("perron_frobenius: operator must map a space to itself");
  const Eigen::MatrixXd& M = T.action();
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (!(M(i, j) > 0.0))
        throw DomainError("perron_frobenius: kernel is not strictly positive at node (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
  if (!(tol > 0.0)) throw DomainError("perron_frobenius: tol must be positive");

  const Iteration right = power_iterate(T, tol, max_iter, "eigenfunction");
  const Iteration left = power_iterate(T.adjoint(), tol, max_iter, "dual eigenfunction");
  EigenPair p{right.rho, 1.0 / right.rho, right.g, left.g, inner(left.g, right.g), right.residual,
              right.rate, false, right.iterations};
  if (T.domain()->size() <= kSpectrumLimit) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    if (es.info() == Eigen::Success) {
      std::vector<double> mods;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
      std::sort(mods.begin(), mods.end(), std::greater<double>());
      p.gap = mods.size() > 1 ? mods[1] / mods[0] : 0.0;
      p.gap_from_spectrum = true;
    }
  }
  return p;
}

EigenPair perron_frobenius(const CcapmModel& model, double tol, std::size_t max_iter) {
  return perron_frobenius(model.transfer_operator(), tol, max_iter);
}

}  // namespace locid
