#pragma once

// Local identification in the parametric-style setting: a nonlinear map
// m : A -> B with m(alpha0) = 0 and derivative m'. All deviations are
// expressed as delta = alpha - alpha0.

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "locid/fnspace.hpp"
#include "locid/linop.hpp"
#include "locid/random.hpp"

namespace locid {

inline constexpr double kBasePointTol = 1e-10;

class MomentMap {
 public:
  using Eval = std::function<GridFunction(const GridFunction&)>;
  using Norm = std::function<double(const GridFunction&)>;

  // domain_norm defaults to the L2 norm of the base point's measure.
  MomentMap(GridFunction base_point, Eval eval, LinearOperator derivative, Norm domain_norm = {},
            double base_tol = kBasePointTol);

  const GridFunction& base_point() const { return base_; }
  const LinearOperator& derivative() const { return derivative_; }
  GridFunction eval(const GridFunction& alpha) const;
  GridFunction eval_at_deviation(const GridFunction& delta) const { return eval(base_ + delta); }
  double domain_norm(const GridFunction& delta) const;
  double codomain_norm(const GridFunction& b) const { return norm(b); }
  double derivative_norm() const { return derivative_norm_; }
  // Threshold for "numerically nonzero" in B: 1e-10 (1 + ||m'||).
  double zero_tol() const { return 1e-10 * (1.0 + derivative_norm_); }

 private:
  GridFunction base_;
  Eval eval_;
  LinearOperator derivative_;
  Norm domain_norm_;
  double derivative_norm_ = 0.0;
};

struct NonlinearityBound {
  double L = 0.0;
  double r = 1.0;
  // N'' as a ball of this radius in the domain norm; infinity means all of A.
  double radius = std::numeric_limits<double>::infinity();
  std::function<bool(const GridFunction& delta)> member;  // optional custom N''

  void validate() const;
  bool in_neighborhood(const GridFunction& delta, double delta_norm) const;
};

struct GateauxReport {
  double max_rel_error = 0.0;        // at the smallest step
  std::vector<double> per_step;      // worst relative error for each step
  bool richardson = false;
};

GateauxReport gateaux_check(const MomentMap& map, const std::vector<GridFunction>& directions,
                            const std::vector<double>& steps, bool richardson = false);

double estimate_nonlinearity(const MomentMap& map, double r,
                             const std::vector<GridFunction>& deviations);

struct RankReport {
  bool holds = false;
  double sigma_min = 0.0;
  double mu1 = 0.0;
  bool vacuous = false;
  std::string warning;
};

RankReport rank_condition(const LinearOperator& op, double tol,
                          const std::optional<OrthonormalBasis>& subspace = std::nullopt);

// ||op delta|| > L ||delta||^r with the L2 norm on the domain.
bool in_identification_set(const GridFunction& delta, const LinearOperator& op,
                           const NonlinearityBound& bound);
// Same with the map's own domain norm.
bool in_identification_set(const GridFunction& delta, const MomentMap& map,
                           const NonlinearityBound& bound);

struct EllipsoidReport {
  bool inside = false;
  bool is_center = false;  // b = 0: the point is alpha0, which N excludes
  double lhs = 0.0;        // sum_j mu_j^{-2/(r-1)} b_j^2
  double rhs = 0.0;        // L^{-2/(r-1)}
};

EllipsoidReport in_ellipsoid(const Eigen::VectorXd& b, const Eigen::VectorXd& mu,
                             const NonlinearityBound& bound);

// Coefficients b with b_j = 0 where mu_j = 0 and lhs = fill * rhs, fill in (0, 1).
// Mass is spread as b_j ~ mu_j^{1/(r-1)} decay^j times Gaussian noise.
Eigen::VectorXd ellipsoid_draw(const Eigen::VectorXd& mu, const NonlinearityBound& bound, Rng& rng,
                               double fill, double decay = 0.7);

struct LocalIdOptions {
  // Draws a deviation delta; default: SVD-basis coefficients with geometric decay.
  std::function<GridFunction(Rng&, std::size_t)> sampler;
  bool ignore_bound = false;  // sample the raw proposal (no N'' or N''' restriction)
  std::size_t budget = 200000;
  double scale = 1.0;
  double decay = 0.7;
};

struct LocalIdReport {
  std::size_t requested = 0;
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  double min_m_norm = std::numeric_limits<double>::infinity();
  bool empty_neighborhood = false;
  std::string diagnostic;
};

LocalIdReport verify_local_id(const MomentMap& map, const NonlinearityBound& bound,
                              std::size_t samples, std::uint64_t seed,
                              const LocalIdOptions& options = {});

// Sequence-space example in which alpha0 = 0 is not identified on any ball.
struct CounterexampleF {
  std::function<double(double)> f;
  std::function<double(double)> d2f;  // optional; finite differences otherwise
};

CounterexampleF default_counterexample_f();

struct CounterexampleOptions {
  std::size_t terms = 64;
  CounterexampleF f = default_counterexample_f();
};

struct CounterexampleResult {
  int k = 0;
  double m_norm = 0.0;
  double dev_norm = 0.0;
  double expected_dev_norm = 0.0;  // (sum_{j>k} p_j)^{1/4}
  bool in_N = true;
  double L = 0.0;
};

// Weights p_j = 2^{-j}, j = 1..terms, with the tail folded into the last one.
Eigen::VectorXd counterexample_weights(std::size_t terms);
// sup |f''| / 2 by a dense scan; throws DomainError if f is not admissible
// (zeros exactly at 0 and 1, f'(0) = 1).
double counterexample_L(const CounterexampleF& f);
CounterexampleResult counterexample(int k, const CounterexampleOptions& options = {});
// alpha^k: zeros in the first k positions, ones after.
GridFunction counterexample_alpha(int k, const MeasurePtr& seq);
MomentMap counterexample_map(const CounterexampleOptions& options = {});
NonlinearityBound counterexample_bound(const CounterexampleOptions& options = {});
// Draws from the open ball of `radius`; half the draws are some alpha^k inside it.
std::function<GridFunction(Rng&, std::size_t)> counterexample_ball_sampler(const MeasurePtr& seq,
                                                                           double radius);
// Uniform coordinates in (-s, s) with s drawn from (0, max_scale).
std::function<GridFunction(Rng&, std::size_t)> counterexample_box_sampler(const MeasurePtr& seq,
                                                                          double max_scale);

// Tangential cone sets around alpha0.
struct ConeMembership {
  bool in_N = false;
  bool in_Nprime = false;
  bool in_N_eta = false;
  bool in_Nprime_eta = false;
  double eta = 0.0;
  double m_norm = 0.0;     // ||m(alpha)||
  double lin_norm = 0.0;   // ||m'(alpha - alpha0)||
  double rem_norm = 0.0;   // ||m(alpha) - m'(alpha - alpha0)||
  double dev_norm = 0.0;   // ||alpha - alpha0||
};

ConeMembership cone_classify(const MomentMap& map, const GridFunction& alpha, double eta);
// Flags from the four norms alone; tol is the "numerically nonzero" threshold.
ConeMembership cone_flags(double m_norm, double lin_norm, double rem_norm, double eta, double tol);

struct ConeSuiteReport {
  static constexpr std::size_t kRules = 8;
  static const std::array<const char*, kRules> rule_names;
  std::array<std::size_t, kRules> violations{};
  std::array<std::size_t, kRules> exercised{};  // instances where the premise held
  std::size_t instances = 0;
  std::size_t total_violations() const;
};

ConeSuiteReport cone_rule_suite(std::size_t instances, int dim, std::uint64_t seed);

}  // namespace locid
