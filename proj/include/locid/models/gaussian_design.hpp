#pragma once

// Jointly Gaussian instrumental-variable designs discretised on grids:
// W standard normal in one or two coordinates, V = a'W + e_V and
// X2 = b'W + e_X with (e_V, e_X) bivariate normal.

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "locid/fnspace.hpp"

namespace locid {

// Trapezoid nodes on [-span, span] carrying standard normal probability masses.
GridMeasure standard_normal_axis(std::size_t n, double span);

struct GaussianIvDesign {
  int w_dim = 1;
  Eigen::Vector2d v_loading{0.5, 0.0};   // a
  Eigen::Vector2d x2_loading{0.5, 0.0};  // b
  double sd_v = 0.8660254037844386;      // sd of e_V
  double sd_x = 1.0;                     // sd of e_X
  double corr = 0.3;                     // corr(e_V, e_X)
  std::size_t n_w = 15;                  // per axis
  std::size_t n_v = 41;
  double w_span = 3.0;                   // W grid covers [-w_span, w_span] per axis
  double v_span = 0.0;                   // 0 picks max |a'w| + 6 sd_v

  // Scalar W with corr(V, W) = rho and V of unit variance.
  static GaussianIvDesign scalar(double rho);
  // Two-dimensional W; V loads on W1 only, X2 loads on W1 and W2.
  static GaussianIvDesign two_dim(double rho, double b1, double b2);
  void validate() const;
};

class GaussianIvGrids {
 public:
  explicit GaussianIvGrids(GaussianIvDesign design);

  const GaussianIvDesign& design() const { return design_; }
  const MeasurePtr& w_law() const { return w_law_; }      // probability masses of W
  const MeasurePtr& v_nodes() const { return v_nodes_; }  // trapezoid nodes for V
  const MeasurePtr& v_law() const { return v_law_; }      // probability masses of V
  std::size_t nw() const { return w_law_->size(); }
  std::size_t nv() const { return v_nodes_->size(); }
  double index_w(std::size_t iw) const;  // a'w at W node iw

  // Conditional masses P(V + d X2 = v | W = w) at the V nodes; rows index w
  // and sum to 1. Throws DomainError when more than 0.1% of the conditional
  // mass falls outside the V grid.
  Eigen::MatrixXd conditional_masses(double d = 0.0) const;
  // E[X2 | V = v, W = w]; rows index w.
  Eigen::MatrixXd x2_mean() const;
  // E[X2 | W = w].
  Eigen::VectorXd x2_given_w() const;

 private:
  GaussianIvDesign design_;
  MeasurePtr w_law_;
  MeasurePtr v_nodes_;
  MeasurePtr v_law_;
};

// Random designs mixing scalar and two-dimensional instruments, including
// independent ones.
std::vector<GaussianIvDesign> random_designs(std::size_t count, std::uint64_t seed);

}  // namespace locid
