#include <Eigen/QR>

#include <cmath>

#include "locid/error.hpp"
#include "locid/identcore.hpp"

namespace locid {

const std::array<const char*, ConeSuiteReport::kRules> ConeSuiteReport::rule_names = {
    "N_eta & N' in N",
    "N'_eta & N in N'",
    "N_eta & N in N' (eta<1)",
    "N'_eta & N' in N (eta<1)",
    "N_eta & N' == N_eta & N (eta<1)",
    "N'_eta & N' == N'_eta & N (eta<1)",
    "N_eta in N'_{eta/(1-eta)} (eta<1)",
    "N'_eta in N_{eta/(1-eta)} (eta<1)",
};

std::size_t ConeSuiteReport::total_violations() const {
  std::size_t t = 0;
  for (auto v : violations) t += v;
  return t;
}

ConeMembership cone_flags(double m_norm, double lin_norm, double rem_norm, double eta, double tol) {
  if (!(eta > 0.0)) throw DomainError("cone_flags: eta must be positive");
  ConeMembership c;
  c.eta = eta;
  c.m_norm = m_norm;
  c.lin_norm = lin_norm;
  c.rem_norm = rem_norm;
  c.in_N = m_norm > tol;
  c.in_Nprime = lin_norm > tol;
  c.in_N_eta = rem_norm <= eta * m_norm;
  c.in_Nprime_eta = rem_norm <= eta * lin_norm;
  return c;
}

ConeMembership cone_classify(const MomentMap& map, const GridFunction& alpha, double eta) {
  const GridFunction delta = alpha - map.base_point();
  const GridFunction m = map.eval(alpha);
  const GridFunction lin = map.derivative().apply(delta);
  ConeMembership c = cone_flags(norm(m), norm(lin), norm(m - lin), eta, map.zero_tol());
  c.dev_norm = map.domain_norm(delta);
  return c;
}

namespace {

Eigen::MatrixXd random_orthogonal(Rng& rng, int d) {
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gaussian(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

struct Instance {
  MomentMap map;
  GridFunction alpha;
  double eta;
};

Instance draw_instance(Rng& rng, int max_dim) {
  const int d = 1 + static_cast<int>(std::floor(uniform(rng, 0.0, max_dim - 1e-9)));
  auto space = share(GridMeasure::unit(static_cast<std::size_t>(d)));
  const Eigen::MatrixXd U = random_orthogonal(rng, d), V = random_orthogonal(rng, d);
  Eigen::VectorXd s(d);
  for (int j = 0; j < d; ++j) s(j) = std::pow(10.0, uniform(rng, -2.0, 1.0));
  const bool deficient = uniform(rng, 0.0, 1.0) < 0.3;
  if (deficient) s(d - 1) = 0.0;
  const Eigen::MatrixXd A = U * s.asDiagonal() * V.transpose();

  std::vector<Eigen::MatrixXd> S(static_cast<std::size_t>(d));
  for (auto& Si : S) {
    Eigen::MatrixXd g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = gaussian(rng);
    Si = 0.5 * (g + g.transpose()) * std::pow(10.0, uniform(rng, -1.0, 1.0));
  }
  const double u = uniform(rng, 0.0, 1.0);
  double eta;
  if (u < 0.1) eta = 0.5;
  else if (u < 0.75) eta = uniform(rng, 1e-3, 0.999);
  else eta = uniform(rng, 1.0, 3.0);

  Eigen::VectorXd dir(d);
  for (int i = 0; i < d; ++i) dir(i) = gaussian(rng);
  dir /= dir.norm();
  const double scale = std::pow(10.0, uniform(rng, -3.0, 1.5));

  const double kind = uniform(rng, 0.0, 1.0);
  GridFunction base = GridFunction::zero(space);
  LinearOperator deriv(space, space, A);
  if (kind < 0.1) {
    // m has a second zero at delta*: m(delta) = A delta - (q(delta)/q(delta*)) A delta*.
    Eigen::MatrixXd P(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) P(i, j) = gaussian(rng);
    const Eigen::MatrixXd Q = P * P.transpose() + Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd star = dir * scale;
    const double qstar = star.dot(Q * star);
    const Eigen::VectorXd Astar = A * star;
    MomentMap map(base,
                  [A, Q, qstar, Astar](const GridFunction& a) {
                    const Eigen::VectorXd& x = a.values();
                    return GridFunction(a.measure(), A * x - (x.dot(Q * x) / qstar) * Astar);
                  },
                  deriv);
    return {std::move(map), GridFunction(space, star), eta};
  }
  MomentMap map(base,
                [A, S](const GridFunction& a) {
                  const Eigen::VectorXd& x = a.values();
                  Eigen::VectorXd out = A * x;
                  for (std::size_t i = 0; i < S.size(); ++i)
                    out(static_cast<Eigen::Index>(i)) += x.dot(S[i] * x);
                  return GridFunction(a.measure(), out);
                },
                deriv);
  Eigen::VectorXd delta = dir * scale;
  if (kind < 0.15) delta.setZero();
  else if (kind < 0.3 && deficient) delta = V.col(d - 1) * scale;
  return {std::move(map), GridFunction(space, delta), eta};
}

}  // namespace

ConeSuiteReport cone_rule_suite(std::size_t instances, int dim, std::uint64_t seed) {
  if (instances == 0) throw DomainError("cone_rule_suite: instances must be positive");
  if (dim < 1 || dim > 8) throw DomainError("cone_rule_suite: dim must lie in [1, 8]");
  ConeSuiteReport rep;
  rep.instances = instances;
  auto check = [&rep](std::size_t rule, bool premise, bool conclusion) {
    if (!premise) return;
    ++rep.exercised[rule];
    if (!conclusion) ++rep.violations[rule];
  };
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = stream_rng(seed, i);
    const Instance inst = draw_instance(rng, dim);
    const ConeMembership c = cone_classify(inst.map, inst.alpha, inst.eta);
    check(0, c.in_N_eta && c.in_Nprime, c.in_N);
    check(1, c.in_Nprime_eta && c.in_N, c.in_Nprime);
    if (inst.eta < 1.0) {
      const double tol = inst.map.zero_tol();
      const ConeMembership w =
          cone_flags(c.m_norm, c.lin_norm, c.rem_norm, inst.eta / (1.0 - inst.eta), tol);
      check(2, c.in_N_eta && c.in_N, c.in_Nprime);
      check(3, c.in_Nprime_eta && c.in_Nprime, c.in_N);
      check(4, true, (c.in_N_eta && c.in_Nprime) == (c.in_N_eta && c.in_N));
      check(5, true, (c.in_Nprime_eta && c.in_Nprime) == (c.in_Nprime_eta && c.in_N));
      check(6, c.in_N_eta, w.in_Nprime_eta);
      check(7, c.in_Nprime_eta, w.in_N_eta);
    }
  }
  return rep;
}

}  // namespace locid
