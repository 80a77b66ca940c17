#pragma once

// Single-index IV model Y = g(X1 + X2 beta) + U with E[U | W] = 0, and the
// partially linear model Y = X2 beta + g(X1) + U, on a Gaussian design with
// V = X1 + X2 beta0.

#include <cstdint>
#include <functional>

#include "locid/identcore.hpp"
#include "locid/linop.hpp"
#include "locid/models/gaussian_design.hpp"
#include "locid/semiparam.hpp"

namespace locid {

struct IndexFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double df_lipschitz = 0.0;  // Lipschitz constant of df
};

// g0(v) = v + 0.5 sin v, with df Lipschitz constant 0.5.
IndexFunction default_index_function();
IndexFunction linear_index_function(double slope);

class SingleIndexModel {
 public:
  SingleIndexModel(GaussianIvDesign design, double beta0 = 1.0,
                   IndexFunction g0 = default_index_function());

  const GaussianIvGrids& grids() const { return grids_; }
  double beta0() const { return beta0_; }
  const IndexFunction& index_function() const { return g0_; }
  const GridFunction& g0() const { return g0_values_; }  // on the law of V

  // m(beta, g)(w) = E[Y - g(X1 + X2 beta) | W = w].
  GridFunction eval(double beta, const GridFunction& g) const;
  // m'_beta = -E[g0'(V) X2 | W], m'_g h = -E[h(V) | W].
  SplitDerivative split() const;
  SemiparametricModel semiparametric() const;
  // ||m(beta, g0) - m'_beta (beta - beta0)|| <= L |beta - beta0|^2 with
  // L = (C_g / 2) ||E[X2^2 | W]||.
  NonlinearityBound beta_bound() const;

 private:
  GaussianIvGrids grids_;
  double beta0_;
  IndexFunction g0_;
  GridFunction g0_values_;
  GridFunction y_mean_;  // E[Y | W]
};

// Partially linear model on the same design: linear in (beta, g).
SemiparametricModel partially_linear_model(const GaussianIvDesign& design, double beta0 = 1.0,
                                           IndexFunction g0 = default_index_function());

// Operator b(W) -> E[b(W) | V] from L2(P_W) to L2(P_V).
LinearOperator w_given_v_operator(const GaussianIvGrids& grids);

struct IndexDiagnoseOptions {
  double completeness_tol = 1e-10;
  double pi_tol = 1e-8;
  double range_tol = 1e-12;
};

struct IndexDiagnoseReport {
  bool complete = false;      // W given V is complete on the grid
  double sigma_min = 0.0;
  double mu1 = 0.0;
  bool pi_singular = false;
  double lambda_min = 0.0;
  double pi_scale = 0.0;      // trace of the Gram of m'_beta
  bool consistent = false;    // not (complete and Pi nonsingular)
};

// Completeness of W given V forces Pi to be singular, so beta is not locally
// identified in the single-index model.
IndexDiagnoseReport diagnose_index_identification(const SingleIndexModel& model,
                                                  const IndexDiagnoseOptions& options = {});

}  // namespace locid
