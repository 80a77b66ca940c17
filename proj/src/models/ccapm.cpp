#include "locid/models/ccapm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "locid/error.hpp"
#include "locid/models/gaussian_design.hpp"

namespace locid {

void CcapmDesign::validate() const {
  if (!(delta0 > 0.0) || !std::isfinite(gamma0)) throw DomainError("ccapm design: invalid delta0 or gamma0");
  if (!(std::abs(phi) < 1.0)) throw DomainError("ccapm design: |phi| must be below 1");
  if (!(sigma > 0.0)) throw DomainError("ccapm design: sigma must be positive");
  if (!(std::abs(kappa) < 1.0)) throw DomainError("ccapm design: |kappa| must be below 1");
  if (n_c < 3 || n_z < 2) throw DomainError("ccapm design: grids too small");
  if (!(window > 0.0)) throw DomainError("ccapm design: window must be positive");
  if (!(c_span > 0.0) || !(z_span > 0.0)) throw DomainError("ccapm design: spans must be positive");
}

CcapmModel::CcapmModel(CcapmDesign design)
    : design_(std::move(design)), g0_(GridFunction::zero(share(GridMeasure::unit(1)))) {
  design_.validate();
  const CcapmDesign& d = design_;
  const double sd = d.sigma / std::sqrt(1.0 - d.phi * d.phi);
  if (!design_.g0) {
    const double mu = d.mu;
    design_.g0 = [mu, sd](double c) { return 1.0 + 0.3 * std::sin(3.0 * (std::log(c) - mu) / sd); };
  }
  const auto nC = static_cast<Eigen::Index>(d.n_c), nZ = static_cast<Eigen::Index>(d.n_z);
  log_c_ = Eigen::VectorXd::LinSpaced(nC, d.mu - d.c_span * sd, d.mu + d.c_span * sd);
  z_law_ = share(standard_normal_axis(d.n_z, d.z_span));
  const Eigen::VectorXd& pz = z_law_->weights();

  // P(c' | z, c) on rows (z, c), z slowest.
  const double csd = d.sigma * std::sqrt(1.0 - d.kappa * d.kappa);
  P_.resize(nZ * nC, nC);
  for (Eigen::Index iz = 0; iz < nZ; ++iz)
    for (Eigen::Index ic = 0; ic < nC; ++ic) {
      const double mean = d.mu + d.phi * (log_c_(ic) - d.mu) + d.sigma * d.kappa * z_law_->point(std::size_t(iz));
      auto row = P_.row(iz * nC + ic);
      for (Eigen::Index j = 0; j < nC; ++j) {
        const double u = (log_c_(j) - mean) / csd;
        row(j) = std::exp(-0.5 * u * u);
      }
      row /= row.sum();
    }

  // Stationary law of c under the z-averaged chain.
  Eigen::MatrixXd Pc = Eigen::MatrixXd::Zero(nC, nC);
  for (Eigen::Index iz = 0; iz < nZ; ++iz) Pc += pz(iz) * P_.middleRows(iz * nC, nC);
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(nC, 1.0 / static_cast<double>(nC));
  for (int it = 0; it < 100000; ++it) {
    Eigen::RowVectorXd next = pi * Pc;
    next /= next.sum();
    const double diff = (next - pi).cwiseAbs().sum();
    pi = next;
    if (diff < 1e-16) break;
  }
  c_law_ = share(GridMeasure::line(log_c_.array().exp().matrix(), pi.transpose()));
  w_law_ = share(GridMeasure::tensor(*z_law_, *c_law_));

  g0_ = GridFunction::tabulate(c_law_, design_.g0);
  if (!(g0_.values().minCoeff() > 0.0)) throw DomainError("ccapm design: g0 must be positive");
  g0_ *= 1.0 / norm(g0_);

  // Payoffs priced so that the restriction holds at (delta0, gamma0, g0).
  const Eigen::ArrayXd cprime = log_c_.array().exp();
  const Eigen::ArrayXd sdf = d.delta0 * cprime.pow(-d.gamma0) * g0_.values().array();
  R_.resize(P_.rows(), nC);
  for (Eigen::Index iw = 0; iw < P_.rows(); ++iw) {
    const double z = z_law_->point(std::size_t(iw / nC));
    const Eigen::ArrayXd payoff = d.r_f + cprime * std::exp(d.z_loading * z);
    const double price = (P_.row(iw).array().transpose() * sdf * payoff).sum() / g0_[std::size_t(iw % nC)];
    R_.row(iw) = (payoff / price).transpose();
  }

  const Eigen::ArrayXd lc = log_c_.array();
  const Eigen::ArrayXd sup_pow =
      cprime.pow(-(d.gamma0 - d.window)).max(cprime.pow(-(d.gamma0 + d.window)));
  D_.resize(R_.rows(), R_.cols());
  for (Eigen::Index iw = 0; iw < R_.rows(); ++iw)
    D_.row(iw) = ((1.0 + R_.row(iw).array().abs().transpose()) * (2.0 + lc * lc) * sup_pow).transpose();
  if (!(D_.minCoeff() >= 1.0)) throw DomainError("ccapm design: envelope D falls below 1");
}

GridFunction CcapmModel::eval(double delta, double gamma, const GridFunction& g) const {
  if (!same_measure(g.measure(), c_law_)) throw ShapeError("ccapm: g must live on the law of c");
  if (!(std::abs(gamma - design_.gamma0) <= design_.window))
    throw DomainError("ccapm: envelope violation, gamma = " + std::to_string(gamma) + " outside [" +
                      std::to_string(design_.gamma0 - design_.window) + ", " +
                      std::to_string(design_.gamma0 + design_.window) + "]");
  const Eigen::VectorXd weighted =
      (log_c_.array().exp().pow(-gamma) * g.values().array()).matrix() * delta;
  Eigen::VectorXd out = P_.cwiseProduct(R_) * weighted;
  for (Eigen::Index iw = 0; iw < out.size(); ++iw) out(iw) -= g[row_c(std::size_t(iw))];
  return GridFunction(w_law_, out);
}

LinearOperator CcapmModel::pricing_operator() const {
  const Eigen::VectorXd a = design_.delta0 * log_c_.array().exp().pow(-design_.gamma0).matrix();
  return LinearOperator(c_law_, w_law_, P_.cwiseProduct(R_) * a.asDiagonal());
}

SplitDerivative CcapmModel::split() const {
  const LinearOperator L = pricing_operator();
  Eigen::MatrixXd M = L.action();
  for (Eigen::Index iw = 0; iw < M.rows(); ++iw) M(iw, Eigen::Index(row_c(std::size_t(iw)))) -= 1.0;
  const Eigen::VectorXd Ag = L.action() * g0_.values();
  const Eigen::VectorXd Agl = L.action() * g0_.values().cwiseProduct(log_c_);
  return {{GridFunction(w_law_, Ag / design_.delta0), GridFunction(w_law_, -Agl)},
          LinearOperator(c_law_, w_law_, M)};
}

double CcapmModel::g_norm(const GridFunction& g) const {
  const Eigen::VectorXd ed = P_.cwiseProduct(D_).rowwise().sum();
  const Eigen::VectorXd eg2 = P_ * g.values().cwiseAbs2();
  return std::sqrt(w_law_->weights().dot(ed.cwiseAbs2().cwiseProduct(eg2)));
}

SemiparametricModel CcapmModel::semiparametric() const {
  auto self = std::make_shared<const CcapmModel>(*this);
  return {beta0(), g0_,
          [self](const Eigen::VectorXd& b, const GridFunction& g) { return self->eval(b(0), b(1), g); },
          split(), [self](const GridFunction& g) { return self->g_norm(g); }, std::nullopt};
}

LinearOperator CcapmModel::condition_on_c() const {
  const auto nC = Eigen::Index(nc());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nC, Eigen::Index(nw()));
  for (Eigen::Index iw = 0; iw < C.cols(); ++iw)
    C(iw % nC, iw) = z_law_->weights()(iw / nC);
  return LinearOperator(w_law_, c_law_, C);
}

LinearOperator CcapmModel::transfer_operator() const {
  const Eigen::VectorXd a = log_c_.array().exp().pow(-design_.gamma0).matrix();
  const Eigen::MatrixXd A = P_.cwiseProduct(R_) * a.asDiagonal();
  return LinearOperator(c_law_, c_law_, condition_on_c().action() * A);
}

double CcapmModel::iterated_expectation_gap() const {
  const LinearOperator lhs = condition_on_c().compose(pricing_operator());
  const LinearOperator rhs = transfer_operator() * design_.delta0;
  return (lhs.action() - rhs.action()).cwiseAbs().maxCoeff();
}

LinearOperator CcapmModel::completeness_operator(std::size_t ic) const {
  if (ic >= nc()) throw DomainError("ccapm: c index out of range");
  const auto nC = Eigen::Index(nc()), nZ = Eigen::Index(z_law_->size());
  const LinearOperator L = pricing_operator();
  Eigen::MatrixXd M(nZ, nC);
  Eigen::VectorXd pc = Eigen::VectorXd::Zero(nC);
  for (Eigen::Index iz = 0; iz < nZ; ++iz) {
    M.row(iz) = L.action().row(iz * nC + Eigen::Index(ic));
    pc += z_law_->weights()(iz) * P_.row(iz * nC + Eigen::Index(ic)).transpose();
  }
  auto dom = share(GridMeasure::line(log_c_.array().exp().matrix(), pc));
  return LinearOperator(dom, z_law_, M);
}

LinearOperator CcapmModel::joint_completeness_operator() const {
  const auto nC = Eigen::Index(nc()), nW = Eigen::Index(nw());
  const LinearOperator L = pricing_operator();
  // Domain points (c', c) with c' slowest; mass P(c_t = c) P(c' | c).
  Eigen::MatrixXd pts(nC * nC, 2);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(nC * nC);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nW, nC * nC);
  for (Eigen::Index iw = 0; iw < nW; ++iw) {
    const Eigen::Index ic = iw % nC;
    for (Eigen::Index j = 0; j < nC; ++j) {
      M(iw, j * nC + ic) = L.action()(iw, j);
      mass(j * nC + ic) += w_law_->weights()(iw) * P_(iw, j);
    }
  }
  for (Eigen::Index j = 0; j < nC; ++j)
    for (Eigen::Index ic = 0; ic < nC; ++ic) {
      pts(j * nC + ic, 0) = std::exp(log_c_(j));
      pts(j * nC + ic, 1) = std::exp(log_c_(ic));
    }
  return LinearOperator(share(GridMeasure(pts, mass)), w_law_, M);
}

CompletenessReport completeness_check(const LinearOperator& op, double tol) {
  CompletenessReport r;
  const SvdDecomposition s = op.svd();
  r.mu1 = s.singular_values.size() ? s.singular_values(0) : 0.0;
  r.sigma_min = sigma_min(s, op.domain()->size());
  r.injective = r.sigma_min > tol * r.mu1;
  const double hs = op.hs_norm();
  r.hs_value = hs * hs;
  return r;
}

GlobalIdReport global_identification_check(const CcapmModel& model,
                                           const std::vector<CcapmCandidate>& candidates,
                                           double solve_tol, double match_tol, double completeness_tol) {
  GlobalIdReport rep;
  const CompletenessReport comp = completeness_check(model.completeness_operator(model.nc() / 2), completeness_tol);
  rep.completeness_holds = comp.injective;
  rep.sigma_min = comp.sigma_min;
  rep.consistent = true;
  const CcapmDesign& d = model.design();
  for (const auto& cand : candidates) {
    CandidateVerdict v;
    const bool positive = cand.g.values().minCoeff() > 0.0;
    const bool in_window = std::abs(cand.gamma - d.gamma0) <= d.window;
    v.admissible = positive && in_window && cand.delta > 0.0;
    if (!v.admissible) {
      v.note = !positive ? "g is not bounded away from zero" : "parameter outside the admissible set";
      rep.verdicts.push_back(v);
      continue;
    }
    const double gn = norm(cand.g);
    v.residual = norm(model.eval(cand.delta, cand.gamma, cand.g)) / gn;
    v.solves = v.residual <= solve_tol;
    v.delta_gap = std::abs(cand.delta - d.delta0);
    v.gamma_gap = std::abs(cand.gamma - d.gamma0);
    v.cosine = inner(cand.g, model.g0()) / (gn * norm(model.g0()));
    const Eigen::ArrayXd ratio = cand.g.values().array() / model.g0().values().array();
    v.ratio_spread = ratio.maxCoeff() / ratio.minCoeff() - 1.0;
    v.matches_truth = v.delta_gap <= match_tol && v.gamma_gap <= match_tol &&
                      v.cosine >= 1.0 - match_tol && v.ratio_spread <= match_tol;
    if (v.solves && !v.matches_truth) {
      rep.consistent = false;
      v.note = "solution differs from (delta0, gamma0, g0)";
    }
    rep.verdicts.push_back(v);
  }
  rep.vacuous = std::none_of(rep.verdicts.begin(), rep.verdicts.end(),
                             [](const CandidateVerdict& v) { return v.solves; });
  if (!rep.completeness_holds) rep.consistent = false;
  return rep;
}

}  // namespace locid
