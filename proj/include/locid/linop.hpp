#pragma once

// Dense operators between weighted-grid spaces. The stored "action matrix"
// M maps value vectors: (T f)_s = sum_t M(s,t) f_t. A kernel-built operator
// has M = K diag(w_dom).

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>

#include "locid/fnspace.hpp"

namespace locid {

inline constexpr double kZeroSingularRel = 1e-12;

struct SvdDecomposition {
  Eigen::VectorXd singular_values;  // nonincreasing, length min(dom, cod)
  OrthonormalBasis right;           // phi_j on the domain
  OrthonormalBasis left;            // psi_j on the codomain
  double zero_threshold = 0.0;      // values at or below are numerically zero

  std::size_t numerical_rank() const;
};

class LinearOperator {
 public:
  LinearOperator(MeasurePtr domain, MeasurePtr codomain, Eigen::MatrixXd action);

  // (T g)(s) = sum_t w_t K(s,t) g(t); K is codomain-size x domain-size.
  static LinearOperator from_kernel(const Eigen::MatrixXd& K, MeasurePtr domain, MeasurePtr codomain,
                                    bool require_nonnegative = false);
  static LinearOperator identity(MeasurePtr space);
  static LinearOperator zero(MeasurePtr domain, MeasurePtr codomain);

  const MeasurePtr& domain() const { return domain_; }
  const MeasurePtr& codomain() const { return codomain_; }
  const Eigen::MatrixXd& action() const { return action_; }
  Eigen::MatrixXd kernel() const;

  GridFunction apply(const GridFunction& f) const;
  GridFunction operator()(const GridFunction& f) const { return apply(f); }

  LinearOperator adjoint() const;
  // this o other (apply other first).
  LinearOperator compose(const LinearOperator& other) const;
  LinearOperator operator+(const LinearOperator& other) const;
  LinearOperator operator-(const LinearOperator& other) const;
  LinearOperator operator*(double s) const;

  SvdDecomposition svd(double rel_tol = kZeroSingularRel) const;
  double hs_norm() const;
  double op_norm() const;

 private:
  MeasurePtr domain_;
  MeasurePtr codomain_;
  Eigen::MatrixXd action_;
};

// Smallest singular value, 0 when the domain is larger than the codomain.
double sigma_min(const SvdDecomposition& s, std::size_t domain_size);

// Joint density table f(x, w) on the X and W grids; rows index x.
struct JointDensity {
  MeasurePtr x;
  MeasurePtr w;
  Eigen::MatrixXd density;
};

// Marginal of W: f_W(w) = sum_x w_x f(x, w).
Eigen::VectorXd w_marginal(const JointDensity& joint);
// Marginal of X: f_X(x) = sum_w w_w f(x, w).
Eigen::VectorXd x_marginal(const JointDensity& joint);

// (T g)(w) = sum_x w_x a(x,w) g(x) f(x,w) / f_W(w), mapping L2 on the X grid
// to L2 on the W grid. `weight` is nx x nw; pass nullopt for a = 1.
// The domain/codomain measures are the grids given in `joint`; use
// law_measures() for the operator between the L2 spaces of the marginal laws.
LinearOperator conditional_expectation(const JointDensity& joint,
                                       const std::optional<Eigen::MatrixXd>& weight = std::nullopt);

// The same operator with domain L2(P_X) and codomain L2(P_W), i.e. grid
// weights multiplied by the marginal densities.
LinearOperator conditional_expectation_between_laws(
    const JointDensity& joint, const std::optional<Eigen::MatrixXd>& weight = std::nullopt);

// Matrix as CSV rows; sidecar JSON names both grids and their sizes.
void write_operator_csv(std::ostream& os, const LinearOperator& op);
std::string operator_sidecar_json(const LinearOperator& op, const std::string& domain_name,
                                  const std::string& codomain_name);
LinearOperator read_operator_csv(std::istream& is, MeasurePtr domain, MeasurePtr codomain);

}  // namespace locid
