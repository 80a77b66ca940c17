#pragma once

// Nonparametric quantile IV: P(Y <= alpha0(X) | W) = tau on a Gaussian
// triangular design X = pi W + eta, Y = alpha0(X) + s(X, W) (Z - z_tau) with
// s(x, w) = s0 (1 + s_het tanh(x - pi w)). The conditional CDF of Y is
// tabulated on y-knots per x (alpha0(x) is always a knot) and interpolated
// by cubic Hermite splines through the CDF and density values.

#include <functional>
#include <vector>

#include "locid/identcore.hpp"
#include "locid/linop.hpp"
#include "locid/random.hpp"

namespace locid {

struct QuantileDesign {
  double tau = 0.5;
  std::size_t nx = 101;
  std::size_t nw = 101;
  std::size_t ny_half = 80;  // knots per side of alpha0(x)
  double pi = 0.6;
  double sd_eta = 0.8;
  double s0 = 0.5;
  double s_het = 0.3;
  double x_span = 3.5;
  double w_span = 3.0;
  double y_span = 6.0;       // knots cover alpha0(x) +- y_span * max s
  std::function<double(double)> alpha0;  // default 0.5 x + 0.3 sin 2x

  void validate() const;
};

class QuantileIvModel {
 public:
  explicit QuantileIvModel(QuantileDesign design = {});

  const QuantileDesign& design() const { return design_; }
  double tau() const { return design_.tau; }
  const MeasurePtr& x_law() const { return derivative_.domain(); }
  const MeasurePtr& w_law() const { return derivative_.codomain(); }
  const GridFunction& alpha0() const { return alpha0_; }

  // m(alpha)(w) = P(Y <= alpha(X) | W = w) - tau.
  GridFunction eval(const GridFunction& alpha) const;
  // m'(alpha0) h = E[f_Y(alpha0(X) | X, W) h(X) | W].
  const LinearOperator& derivative() const { return derivative_; }
  MomentMap moment_map() const;

  double L1() const { return L1_; }  // sup |d f_Y / dy| of the interpolant
  double L2() const { return L2_; }  // max p(x | w) / p(x)
  // ||m(alpha) - m'(alpha - alpha0)|| <= L1 L2 ||alpha - alpha0||^2.
  NonlinearityBound bound() const;

  // Smooth deviation sum_k c_k cos(k pi (x + span) / (2 span)), k < 6, with L2 norm `size`.
  GridFunction random_deviation(Rng& rng, double size) const;

  // Interpolated conditional CDF and density at (x node, w node).
  double cdf(std::size_t ix, std::size_t iw, double y) const;
  double pdf(std::size_t ix, std::size_t iw, double y) const;
  // Closed forms the tables were built from.
  double cdf_exact(std::size_t ix, std::size_t iw, double y) const;
  double scale(std::size_t ix, std::size_t iw) const;
  double y_min(std::size_t ix) const;
  double y_max(std::size_t ix) const;
  // Conditional masses P(X = x | W = w); rows index w.
  const Eigen::MatrixXd& x_given_w() const { return x_given_w_; }

 private:
  struct Cell {
    std::size_t k;
    double t;
  };
  Cell locate(std::size_t ix, double y) const;
  std::size_t offset(std::size_t ix, std::size_t iw) const { return (ix * design_.nw + iw) * ny_; }

  QuantileDesign design_;
  double z_tau_ = 0.0;
  double step_ = 0.0;
  std::size_t ny_ = 0;
  Eigen::VectorXd x_nodes_, w_nodes_;
  std::vector<double> F_, f_;
  Eigen::MatrixXd x_given_w_;
  LinearOperator derivative_;
  GridFunction alpha0_;
  double L1_ = 0.0, L2_ = 0.0;
};

}  // namespace locid
