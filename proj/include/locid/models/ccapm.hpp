#pragma once

// Consumption CAPM with habit-like state function g:
//   E[R_{t+1} delta c_{t+1}^{-gamma} g(c_{t+1}) | W_t] = g(c_t),  W_t = (z_t, c_t),
// where c is gross consumption growth following a Gaussian AR(1) in logs and
// z_t is a signal about next period's shock. Returns are priced so that the
// restriction holds exactly at (delta0, gamma0, g0) on the grid.

#include <functional>
#include <string>
#include <vector>

#include "locid/fnspace.hpp"
#include "locid/identcore.hpp"
#include "locid/linop.hpp"
#include "locid/semiparam.hpp"

namespace locid {

struct CcapmDesign {
  double delta0 = 0.97;
  double gamma0 = 2.0;
  double mu = 0.02;        // mean of log growth
  double phi = 0.5;        // AR(1) coefficient of log growth
  double sigma = 0.05;     // innovation sd
  double kappa = 0.9;      // corr(z_t, next innovation)
  double r_f = 1.0;        // payoff r_f + c' exp(z_loading z)
  double z_loading = 0.1;
  std::size_t n_c = 21;
  std::size_t n_z = 25;
  double c_span = 4.0;     // log-growth grid covers mu +- c_span stationary sds
  double z_span = 3.0;
  double window = 1.0;     // gamma restricted to [gamma0 - window, gamma0 + window]
  std::function<double(double)> g0;  // default 1 + 0.3 sin(3 (ln c - mu) / sd), then normalised

  void validate() const;
};

class CcapmModel {
 public:
  explicit CcapmModel(CcapmDesign design = {});

  const CcapmDesign& design() const { return design_; }
  const MeasurePtr& c_law() const { return c_law_; }  // stationary law of c
  const MeasurePtr& w_law() const { return w_law_; }  // law of (z, c); z varies slowest
  const MeasurePtr& z_law() const { return z_law_; }
  const GridFunction& g0() const { return g0_; }
  Eigen::Vector2d beta0() const { return {design_.delta0, design_.gamma0}; }
  std::size_t nc() const { return c_law_->size(); }
  std::size_t nw() const { return w_law_->size(); }

  // Rows index (z, c), columns c'.
  const Eigen::MatrixXd& transition() const { return P_; }
  const Eigen::MatrixXd& returns() const { return R_; }

  // m(delta, gamma, g)(z, c) = E[R delta c'^{-gamma} g(c') | z, c] - g(c).
  GridFunction eval(double delta, double gamma, const GridFunction& g) const;
  SplitDerivative split() const;
  // ||g||_G = ||E[D | W] g(c')|| with the envelope D.
  double g_norm(const GridFunction& g) const;
  // D = (1 + |R|)(2 + ln^2 c') sup over the gamma window of c'^{-gamma}.
  const Eigen::MatrixXd& envelope() const { return D_; }
  SemiparametricModel semiparametric() const;

  // h(c') -> E[A h(c') | W] with A = R delta0 c'^{-gamma0}.
  LinearOperator pricing_operator() const;
  // b(z, c) -> E[b | c] on the stationary law.
  LinearOperator condition_on_c() const;
  // g -> E[R c'^{-gamma0} g(c') | c]; its leading eigenvalue is 1 / delta0.
  LinearOperator transfer_operator() const;
  // max |entries| of condition_on_c o pricing_operator - delta0 transfer_operator.
  double iterated_expectation_gap() const;
  // h(c') -> E[A h(c') | z, c = c_ic] from L2(P(c' | c)) to L2(P_z).
  LinearOperator completeness_operator(std::size_t ic) const;
  // h(c', c) -> E[A h(c', c) | W] from the joint law of (c', c) to L2(P_W).
  LinearOperator joint_completeness_operator() const;

 private:
  CcapmDesign design_;
  MeasurePtr c_law_, z_law_, w_law_;
  Eigen::VectorXd log_c_;
  Eigen::MatrixXd P_, R_, D_;
  GridFunction g0_;
  std::size_t row_c(std::size_t iw) const { return iw % nc(); }
};

struct CompletenessReport {
  bool injective = false;
  double sigma_min = 0.0;
  double mu1 = 0.0;
  double hs_value = 0.0;  // squared Hilbert-Schmidt norm
};

CompletenessReport completeness_check(const LinearOperator& op, double tol = 1e-10);

struct CcapmCandidate {
  double delta = 0.0;
  double gamma = 0.0;
  GridFunction g;
};

struct CandidateVerdict {
  bool admissible = false;   // g bounded away from zero and gamma inside the window
  bool solves = false;
  double residual = 0.0;     // ||m|| / ||g||
  bool matches_truth = false;
  double delta_gap = 0.0;
  double gamma_gap = 0.0;
  double cosine = 0.0;       // <g, g0> / (||g|| ||g0||)
  double ratio_spread = 0.0; // max(g / g0) / min(g / g0) - 1
  std::string note;
};

struct GlobalIdReport {
  bool completeness_holds = false;
  double sigma_min = 0.0;
  std::vector<CandidateVerdict> verdicts;
  bool consistent = false;  // every admissible solution equals (delta0, gamma0, g0) up to scale
  bool vacuous = false;     // no candidate solves the restriction
};

// Every admissible candidate solving the restriction must share gamma0 and
// delta0 and have g proportional to g0.
GlobalIdReport global_identification_check(const CcapmModel& model,
                                           const std::vector<CcapmCandidate>& candidates,
                                           double solve_tol = 1e-8, double match_tol = 1e-6,
                                           double completeness_tol = 1e-10);

}  // namespace locid
