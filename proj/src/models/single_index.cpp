#include "locid/models/single_index.hpp"

#include <cmath>

#include "locid/error.hpp"

namespace locid {

IndexFunction default_index_function() {
  return {[](double v) { return v + 0.5 * std::sin(v); },
          [](double v) { return 1.0 + 0.5 * std::cos(v); }, 0.5};
}

IndexFunction linear_index_function(double slope) {
  return {[slope](double v) { return slope * v; }, [slope](double) { return slope; }, 0.0};
}

SingleIndexModel::SingleIndexModel(GaussianIvDesign design, double beta0, IndexFunction g0)
    : grids_(std::move(design)),
      beta0_(beta0),
      g0_(std::move(g0)),
      g0_values_(GridFunction::tabulate(grids_.v_law(), g0_.f)),
      y_mean_(grids_.w_law(), grids_.conditional_masses() * g0_values_.values()) {
  if (!g0_.f || !g0_.df) throw DomainError("single index: g0 and its derivative are required");
}

GridFunction SingleIndexModel::eval(double beta, const GridFunction& g) const {
  if (!same_measure(g.measure(), grids_.v_law()))
    throw ShapeError("single index: g must live on the law of V");
  const Eigen::MatrixXd P = grids_.conditional_masses(beta - beta0_);
  return GridFunction(grids_.w_law(), y_mean_.values() - P * g.values());
}

SplitDerivative SingleIndexModel::split() const {
  const Eigen::MatrixXd P = grids_.conditional_masses();
  const Eigen::VectorXd dg = GridFunction::tabulate(grids_.v_law(), g0_.df).values();
  const Eigen::MatrixXd E = grids_.x2_mean();
  Eigen::VectorXd col = -(P.cwiseProduct(E) * dg);
  return {{GridFunction(grids_.w_law(), col)}, LinearOperator(grids_.v_law(), grids_.w_law(), -P)};
}

SemiparametricModel SingleIndexModel::semiparametric() const {
  auto self = std::make_shared<const SingleIndexModel>(*this);
  return {Eigen::VectorXd::Constant(1, beta0_), g0_values_,
          [self](const Eigen::VectorXd& b, const GridFunction& g) { return self->eval(b(0), g); },
          split(), {}, std::nullopt};
}

NonlinearityBound SingleIndexModel::beta_bound() const {
  const GaussianIvDesign& d = grids_.design();
  const double resid_var = d.sd_x * d.sd_x * (1.0 - d.corr * d.corr);
  const Eigen::MatrixXd P = grids_.conditional_masses();
  const Eigen::MatrixXd E = grids_.x2_mean();
  Eigen::VectorXd second = (P.cwiseProduct(E.cwiseProduct(E))).rowwise().sum();
  second.array() += resid_var;
  NonlinearityBound b;
  b.L = 0.5 * g0_.df_lipschitz * norm(GridFunction(grids_.w_law(), second));
  b.r = 2.0;
  return b;
}

SemiparametricModel partially_linear_model(const GaussianIvDesign& design, double beta0,
                                           IndexFunction g0) {
  auto grids = std::make_shared<const GaussianIvGrids>(design);
  const Eigen::MatrixXd P = grids->conditional_masses();
  const Eigen::VectorXd ex = grids->x2_given_w();
  GridFunction g0v = GridFunction::tabulate(grids->v_law(), g0.f);
  const Eigen::VectorXd y = ex * beta0 + P * g0v.values();
  auto eval = [grids, P, ex, y](const Eigen::VectorXd& b, const GridFunction& g) {
    if (!same_measure(g.measure(), grids->v_law()))
      throw ShapeError("partially linear: g must live on the law of V");
    return GridFunction(grids->w_law(), y - ex * b(0) - P * g.values());
  };
  SplitDerivative split{{GridFunction(grids->w_law(), -ex)},
                        LinearOperator(grids->v_law(), grids->w_law(), -P)};
  return {Eigen::VectorXd::Constant(1, beta0), g0v, eval, split, {}, std::nullopt};
}

LinearOperator w_given_v_operator(const GaussianIvGrids& grids) {
  const Eigen::MatrixXd P = grids.conditional_masses();
  const Eigen::VectorXd& pw = grids.w_law()->weights();
  const Eigen::VectorXd& pv = grids.v_law()->weights();
  Eigen::MatrixXd Q = (pw.asDiagonal() * P).transpose();
  Q = pv.cwiseInverse().asDiagonal() * Q;
  return LinearOperator(grids.w_law(), grids.v_law(), Q);
}

IndexDiagnoseReport diagnose_index_identification(const SingleIndexModel& model,
                                                  const IndexDiagnoseOptions& options) {
  IndexDiagnoseReport rep;
  const LinearOperator T = w_given_v_operator(model.grids());
  const SvdDecomposition s = T.svd();
  rep.mu1 = s.singular_values.size() ? s.singular_values(0) : 0.0;
  rep.sigma_min = sigma_min(s, T.domain()->size());
  rep.complete = rep.sigma_min > options.completeness_tol * rep.mu1;

  const SplitDerivative split = model.split();
  const PiReport pi = partial_out(split, options.range_tol);
  for (const auto& c : split.m_beta) rep.pi_scale += inner(c, c);
  rep.lambda_min = pi.lambda_min;
  rep.pi_singular = !(pi.lambda_min > options.pi_tol * rep.pi_scale);
  rep.consistent = !(rep.complete && !rep.pi_singular);
  return rep;
}

}  // namespace locid
