#pragma once

// Semiparametric models alpha = (beta, g): partialling out the g directions
// from the beta derivative and the resulting identification checks.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "locid/fnspace.hpp"
#include "locid/identcore.hpp"
#include "locid/linop.hpp"

namespace locid {

struct SplitDerivative {
  std::vector<GridFunction> m_beta;  // columns m'_beta e_k on the codomain of m_g
  LinearOperator m_g;

  std::size_t p() const { return m_beta.size(); }
  void validate() const;
  // m'_beta a + m'_g dg.
  GridFunction apply(const Eigen::VectorXd& a, const GridFunction& dg) const;
  GridFunction apply_beta(const Eigen::VectorXd& a) const;
};

struct PiReport {
  Eigen::MatrixXd pi;
  Eigen::VectorXd pi_eigenvalues;  // ascending
  std::vector<GridFunction> zeta_star;
  OrthonormalBasis range_basis;    // truncated closure of the range of m_g
  double lambda_min = 0.0;
  double eps1 = 0.0;
  double c_star = 0.0;
  double eps = 0.0;
  double range_tol = 0.0;
  std::size_t range_rank = 0;
  double tail_singular_mass = 0.0;  // sum of mu_j^2 dropped by the truncation
  bool degenerate_m_g = false;

  bool nonsingular(double tol) const { return lambda_min > tol; }
};

PiReport partial_out(const SplitDerivative& split, double range_tol = 1e-12);

struct InequalityCheck {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;
};

// ||m'_beta a + m'_g dg|| / (|a| + ||m'_g dg||) over random (a, dg).
InequalityCheck split_inequality_check(const SplitDerivative& split, const PiReport& report,
                               std::size_t trials, std::uint64_t seed);
// ||b'a + zeta|| / (|a| + ||zeta||) over random a and zeta in the truncated range,
// including near-worst cases zeta = -sum_k a_k zeta*_k + noise.
InequalityCheck partialled_inequality_check(const SplitDerivative& split, const PiReport& report,
                               std::size_t trials, std::uint64_t seed);

// Random split on grids of at most max_n points with 1..max_p columns; m_g is
// sometimes rank deficient and a beta column sometimes lies in its range.
SplitDerivative random_split(std::uint64_t seed, std::uint64_t index, int max_p, int max_n);

struct SemiparametricModel {
  Eigen::VectorXd beta0;
  GridFunction g0;
  std::function<GridFunction(const Eigen::VectorXd& beta, const GridFunction& g)> eval;
  SplitDerivative split;
  std::function<double(const GridFunction& dg)> g_norm;  // defaults to the L2 norm
  std::optional<OrthonormalBasis> g_directions;          // sampling subspace for g - g0

  double g_deviation_norm(const GridFunction& dg) const { return g_norm ? g_norm(dg) : norm(dg); }
  // Map on the direct sum of the g grid and p unit atoms carrying beta.
  MomentMap to_moment_map() const;
};

struct SemiparamOptions {
  double B_radius = 0.1;
  double g_ball = 0.1;
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  double range_tol = 1e-12;
  double pi_tol = 1e-8;
  double linearity_tol = 1e-9;
  std::size_t budget = 100000;
};

struct SemiparamReport {
  bool linear_in_g = false;
  bool pi_nonsingular = false;
  bool precondition_failed = false;
  double lambda_min = 0.0;
  double eps = 0.0;
  std::size_t beta_samples = 0;    // beta != beta0
  std::size_t beta_failures = 0;
  std::size_t g_only_samples = 0;  // beta == beta0, g != g0 with m'_g dg != 0
  std::size_t g_only_failures = 0;
  std::size_t rejected = 0;        // g-deviations outside the restricted set
  bool g_rank_holds = false;       // m'_g nonzero on every sampled g-deviation
  bool full_identification = false;
  double min_m_norm = 0.0;
  std::string diagnostic;

  bool passed() const {
    return !precondition_failed && beta_failures == 0 && g_only_failures == 0 && beta_samples > 0;
  }
};

// Linearity of m(beta0, .) in g, checked by additivity and homogeneity.
bool check_linear_in_g(const SemiparametricModel& model, double tol, std::uint64_t seed);

SemiparamReport verify_linear_in_g(const SemiparametricModel& model, const SemiparamOptions& options);
SemiparamReport verify_nonlinear_in_g(const SemiparametricModel& model, const NonlinearityBound& g_bound,
                              const SemiparamOptions& options);

}  // namespace locid
