#pragma once

// Random operators K = kappa sum_j lambda_j psi_j(s) phi_j(t) with
// lambda_j = u_j sigma_j, and Monte Carlo studies of their injectivity.

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "locid/fnspace.hpp"
#include "locid/linop.hpp"

namespace locid {

struct GeneratorConfig {
  Eigen::VectorXd sigma;           // bounds for |lambda_j|, j = 0..trunc_N-1
  double kappa = 1.0;
  std::size_t trunc_N = 1;
  bool compact = false;
  bool positive = false;
  bool density = false;
  bool dependent_u = false;
  std::optional<double> c;         // sup bound on the bases; measured + 10% when unset
  std::optional<double> sigma_power;  // set when sigma_j = (j+1)^{-power}

  // sigma_j = (j + 1)^{-power}.
  static GeneratorConfig power_law(std::size_t trunc_N, double power);
  void validate() const;
  // sum_{j >= trunc_N} sigma_j^2; NaN when sigma is not a known power law.
  double tail_mass() const;
};

struct OperatorBases {
  OrthonormalBasis phi;  // domain
  OrthonormalBasis psi;  // codomain
};

// Cosine family on the n-point midpoint grid of [0, 1] for both sides.
OperatorBases default_bases(std::size_t n);

struct RandomOperatorDraw {
  LinearOperator op;
  Eigen::MatrixXd kernel;  // codomain x domain node values
  Eigen::VectorXd lambdas;
  double kappa = 1.0;
  double c = 0.0;          // basis bound used by the positivity construction
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

RandomOperatorDraw draw_operator(const GeneratorConfig& config, const OperatorBases& bases,
                                 std::uint64_t seed, std::uint64_t index = 0);

struct InjectivityReport {
  std::size_t draws = 0;
  std::vector<double> sigma_min;
  double fraction_below_tol = 0.0;
  double max_singular_mismatch = 0.0;  // vs sorted |kappa lambda_j|
  double max_lambda_excess = 0.0;      // max_j (|lambda_j| - sigma_j), j >= 1 under positivity
  double min_kernel = 0.0;             // min over draws and nodes
  double max_row_sum_error = 0.0;      // density flag only
  double tail_mass = 0.0;
};

InjectivityReport mc_injectivity(const GeneratorConfig& config, std::size_t draws, double tol,
                                 std::uint64_t seed,
                                 const std::optional<OperatorBases>& bases = std::nullopt);

}  // namespace locid
