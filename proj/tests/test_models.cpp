#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "locid/error.hpp"
#include "locid/models/ccapm.hpp"
#include "locid/models/gaussian_design.hpp"
#include "locid/models/perron_frobenius.hpp"
#include "locid/models/quantile.hpp"
#include "locid/models/single_index.hpp"
#include "locid/random.hpp"
#include "oracles.hpp"

using namespace locid;

namespace {

QuantileDesign small_quantile(double tau = 0.5) {
  QuantileDesign d;
  d.tau = tau;
  d.nx = 31;
  d.nw = 31;
  d.ny_half = 60;
  return d;
}

const CcapmModel& ccapm() {
  static const CcapmModel m{};
  return m;
}

// Standard normal quantile by bisection on the erfc-based CDF.
double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (oracle::normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("gaussian design grids") {
  const GridMeasure axis = standard_normal_axis(41, 4.0);
  CHECK(axis.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(axis.points().col(0).dot(axis.weights()) == doctest::Approx(0.0).scale(1.0));

  const GaussianIvGrids g(GaussianIvDesign::two_dim(0.5, 0.4, 0.6));
  CHECK(g.nw() == 15 * 15);
  const Eigen::MatrixXd P = g.conditional_masses();
  CHECK((P.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(P.minCoeff() >= 0.0);
  // E[V | W] = a'W up to the grid.
  const Eigen::VectorXd ev = P * g.v_nodes()->points().col(0);
  for (std::size_t i = 0; i < g.nw(); ++i) CHECK(std::abs(ev(Eigen::Index(i)) - g.index_w(i)) < 1e-6);

  GaussianIvDesign bad = GaussianIvDesign::scalar(0.5);
  bad.corr = 1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  GaussianIvDesign narrow = GaussianIvDesign::scalar(0.5);
  narrow.v_span = 1.0;
  CHECK_THROWS_AS(GaussianIvGrids(narrow).conditional_masses(), DomainError);
}

TEST_CASE("single index derivative") {
  const double slope = 1.7;
  const SingleIndexModel m(GaussianIvDesign::scalar(0.6), 1.0, linear_index_function(slope));
  const SplitDerivative s = m.split();
  const Eigen::VectorXd ex = m.grids().x2_given_w();
  CHECK((s.m_beta[0].values() + slope * ex).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((s.m_g.action() + m.grids().conditional_masses()).cwiseAbs().maxCoeff() < 1e-15);

  // Dense oracle for m'_g h = -E[h(V) | W]: sum over the conditional law of V.
  const GaussianIvGrids& g = m.grids();
  const GridFunction h = GridFunction::tabulate(g.v_law(), [](double v) { return std::cos(v); });
  const Eigen::MatrixXd P = g.conditional_masses();
  Eigen::VectorXd want(static_cast<Eigen::Index>(g.nw()));
  for (Eigen::Index i = 0; i < want.size(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) acc += P(i, j) * std::cos(g.v_nodes()->point(std::size_t(j)));
    want(i) = -acc;
  }
  CHECK((s.m_g.apply(h).values() - want).cwiseAbs().maxCoeff() < 1e-9);

  CHECK(norm(m.eval(1.0, m.g0())) < 1e-12);
}

TEST_CASE("single index map is differentiable in beta") {
  const SingleIndexModel m(GaussianIvDesign::two_dim(0.5, 0.4, 0.6));
  const SplitDerivative s = m.split();
  const double t = 1e-4;
  const GridFunction fd = (m.eval(1.0 + t, m.g0()) - m.eval(1.0 - t, m.g0())) * (0.5 / t);
  CHECK(norm(fd - s.m_beta[0]) < 1e-3 * norm(s.m_beta[0]));
  const NonlinearityBound b = m.beta_bound();
  for (double d : {0.05, 0.1, 0.2}) {
    const GridFunction rem = m.eval(1.0 + d, m.g0()) - d * s.m_beta[0];
    CHECK(norm(rem) <= b.L * d * d * 1.05);
  }
}

TEST_CASE("independent instruments are not complete") {
  const IndexDiagnoseReport r = diagnose_index_identification(SingleIndexModel(GaussianIvDesign::scalar(0.0)));
  CHECK_FALSE(r.complete);
  CHECK(r.consistent);
  const IndexDiagnoseReport s = diagnose_index_identification(SingleIndexModel(GaussianIvDesign::scalar(0.5)));
  CHECK(s.pi_singular);
  CHECK(s.consistent);
  const IndexDiagnoseReport t =
      diagnose_index_identification(SingleIndexModel(GaussianIvDesign::two_dim(0.5, 0.4, 0.6)));
  CHECK_FALSE(t.pi_singular);
  CHECK(t.lambda_min > 1e-4 * t.pi_scale);
  CHECK(t.consistent);
}

TEST_CASE("partially linear model is identified") {
  SemiparamOptions o;
  o.samples = 100;
  const SemiparamReport r = verify_linear_in_g(partially_linear_model(GaussianIvDesign::two_dim(0.5, 0.4, 0.6)), o);
  CHECK(r.passed());
  CHECK(r.beta_failures == 0);
}

TEST_CASE("quantile model tables") {
  const QuantileDesign d = small_quantile(0.3);
  const QuantileIvModel q(d);
  const double z = normal_quantile(0.3);
  // Cubic Hermite error bound h^4 / 384 sup|F''''| with knot spacing h and
  // F'''' = phi'''(u) / s^4, phi'''(u) = (3u - u^3) phi(u).
  double phi3 = 0.0;
  for (double u = -6.0; u <= 6.0; u += 1e-4)
    phi3 = std::max(phi3, std::abs((3 * u - u * u * u) * std::exp(-0.5 * u * u) / std::sqrt(2 * M_PI)));
  const double h = d.y_span * d.s0 * (1 + d.s_het) / double(d.ny_half);
  for (std::size_t ix : {0u, 7u, 15u, 30u})
    for (std::size_t iw : {0u, 11u, 30u}) {
      const double a = q.alpha0()[ix];
      const double s = q.scale(ix, iw);
      CHECK(q.cdf(ix, iw, a) == doctest::Approx(0.3).epsilon(1e-14));
      for (double y : {a - 0.37 * s, a + 0.11 * s, a + 1.3 * s}) {
        CHECK(std::abs(q.cdf_exact(ix, iw, y) - oracle::normal_cdf((y - a) / s + z)) < 1e-12);
        CHECK(std::abs(q.cdf(ix, iw, y) - q.cdf_exact(ix, iw, y)) <= std::pow(h, 4) / 384 * phi3 / std::pow(s, 4));
      }
    }
  CHECK(norm(q.eval(q.alpha0())) < 1e-12);
  CHECK_THROWS_AS(q.cdf(0, 0, q.y_max(0) + 1.0), DomainError);
}

TEST_CASE("quantile derivative") {
  const QuantileIvModel q(small_quantile());
  const Eigen::MatrixXd& P = q.x_given_w();
  const double phi0 = std::exp(-0.0) / std::sqrt(2.0 * M_PI);
  Eigen::MatrixXd want(P.rows(), P.cols());
  for (Eigen::Index iw = 0; iw < P.rows(); ++iw)
    for (Eigen::Index ix = 0; ix < P.cols(); ++ix)
      want(iw, ix) = P(iw, ix) * phi0 / q.scale(std::size_t(ix), std::size_t(iw));
  CHECK((q.derivative().action() - want).cwiseAbs().maxCoeff() < 1e-9);

  const MomentMap map = q.moment_map();
  std::vector<GridFunction> dirs;
  for (std::uint64_t i = 0; i < 10; ++i) {
    Rng rng = stream_rng(1, i);
    dirs.push_back(q.random_deviation(rng, 1.0));
  }
  CHECK(gateaux_check(map, dirs, {1e-3, 1e-4}, true).max_rel_error < 1e-5);
}

TEST_CASE("quantile nonlinearity constants") {
  const QuantileIvModel q(small_quantile());
  const Eigen::MatrixXd& P = q.x_given_w();
  const Eigen::VectorXd pw = q.w_law()->weights();
  const Eigen::VectorXd px = P.transpose() * pw;
  double l2 = 0.0;
  for (Eigen::Index iw = 0; iw < P.rows(); ++iw)
    for (Eigen::Index ix = 0; ix < P.cols(); ++ix) l2 = std::max(l2, P(iw, ix) / px(ix));
  CHECK(q.L2() == doctest::Approx(l2).epsilon(1e-9));
  CHECK(q.L1() > 0.0);
  const NonlinearityBound b = q.bound();
  CHECK(b.r == 2.0);
  CHECK(b.L == doctest::Approx(q.L1() * q.L2()));

  std::vector<GridFunction> devs;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng = stream_rng(2, i);
    devs.push_back(q.random_deviation(rng, std::pow(10.0, uniform(rng, -3.0, -0.5))));
  }
  CHECK(estimate_nonlinearity(q.moment_map(), 2.0, devs) <= 1.05 * b.L);
}

TEST_CASE("ccapm restriction") {
  const CcapmModel& m = ccapm();
  const CcapmDesign& d = m.design();
  CHECK(norm(m.eval(d.delta0, d.gamma0, m.g0())) < 1e-12);
  CHECK(norm(m.eval(d.delta0, d.gamma0, 3.0 * m.g0())) < 1e-12);
  CHECK(norm(m.eval(d.delta0, d.gamma0 + 0.2, m.g0())) > 1e-4);
  CHECK_THROWS_AS(m.eval(d.delta0, d.gamma0 + 1.5, m.g0()), DomainError);
  CHECK(norm(m.g0()) == doctest::Approx(1.0));
  CHECK(m.envelope().minCoeff() >= 1.0);
  CHECK((m.transition().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(m.iterated_expectation_gap() < 1e-12);
  CHECK(m.c_law()->total_mass() == doctest::Approx(1.0));
}

TEST_CASE("ccapm derivative") {
  const CcapmModel& m = ccapm();
  const CcapmDesign& d = m.design();
  const SplitDerivative s = m.split();
  const double t = 1e-5;
  const GridFunction dd = (m.eval(d.delta0 + t, d.gamma0, m.g0()) - m.eval(d.delta0 - t, d.gamma0, m.g0())) * (0.5 / t);
  CHECK(norm(dd - s.m_beta[0]) < 1e-8 * norm(s.m_beta[0]));
  const GridFunction dgam = (m.eval(d.delta0, d.gamma0 + t, m.g0()) - m.eval(d.delta0, d.gamma0 - t, m.g0())) * (0.5 / t);
  CHECK(norm(dgam - s.m_beta[1]) < 1e-8 * norm(s.m_beta[1]));
  const GridFunction h = GridFunction::tabulate(m.c_law(), [](double c) { return std::cos(5 * c); });
  const GridFunction lin = m.eval(d.delta0, d.gamma0, m.g0() + h) - m.eval(d.delta0, d.gamma0, m.g0());
  CHECK(norm(lin - s.m_g.apply(h)) < 1e-12);
}

TEST_CASE("completeness check") {
  auto u = share(GridMeasure::unit(2));
  CHECK(completeness_check(LinearOperator::identity(u)).injective);
  const CompletenessReport flat = completeness_check(LinearOperator(u, u, Eigen::Matrix2d::Ones()));
  CHECK_FALSE(flat.injective);
  CHECK(flat.sigma_min < 1e-14);
  CHECK(flat.hs_value == doctest::Approx(4.0));

  // Strictly positive 2x2 joint with distinct likelihood ratios: determinant is nonzero.
  const Eigen::Matrix2d joint = (Eigen::Matrix2d() << 0.4, 0.1, 0.2, 0.3).finished();
  CHECK(std::abs(joint.determinant()) > 0.05);
  CHECK(completeness_check(conditional_expectation({u, u, joint})).injective);
  const Eigen::Matrix2d ind = Eigen::Vector2d(0.3, 0.7) * Eigen::Vector2d(0.6, 0.4).transpose();
  CHECK_FALSE(completeness_check(conditional_expectation({u, u, ind})).injective);

  // Gaussian copula density on a 31-point midpoint grid.
  const std::size_t n = 31;
  auto grid = share(GridMeasure::uniform_probability(n));
  const double rho = 0.5;
  const boost::math::normal nd;
  Eigen::MatrixXd K(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = boost::math::quantile(nd, grid->point(i)), y = boost::math::quantile(nd, grid->point(j));
      K(Eigen::Index(i), Eigen::Index(j)) =
          std::exp(-(rho * rho * (x * x + y * y) - 2 * rho * x * y) / (2 * (1 - rho * rho))) / std::sqrt(1 - rho * rho);
    }
  const CompletenessReport c = completeness_check(LinearOperator::from_kernel(K, grid, grid));
  CHECK(std::isfinite(c.hs_value));
  CHECK(c.hs_value == doctest::Approx(oracle::hs_squared(K, grid->weights(), grid->weights())).epsilon(1e-12));

  const CompletenessReport med = completeness_check(ccapm().completeness_operator(ccapm().nc() / 2));
  CHECK(med.injective);
  CHECK(med.sigma_min > 0.0);
}

TEST_CASE("ccapm global identification") {
  const CcapmModel& m = ccapm();
  const CcapmDesign& d = m.design();
  const GlobalIdReport r = global_identification_check(
      m, {{d.delta0, d.gamma0, 2.0 * m.g0()}, {d.delta0, d.gamma0 + 0.5, m.g0()}, {d.delta0, d.gamma0, -m.g0()}});
  REQUIRE(r.verdicts.size() == 3);
  CHECK(r.completeness_holds);
  CHECK(r.verdicts[0].solves);
  CHECK(r.verdicts[0].matches_truth);
  CHECK_FALSE(r.verdicts[1].solves);
  CHECK_FALSE(r.verdicts[2].admissible);
  CHECK(r.consistent);
  CHECK_FALSE(r.vacuous);
}

TEST_CASE("perron frobenius hand cases") {
  auto u = share(GridMeasure::unit(2));
  const EigenPair a = perron_frobenius(LinearOperator(u, u, (Eigen::Matrix2d() << 0.6, 0.4, 0.3, 0.7).finished()));
  CHECK(std::abs(a.rho - 1.0) < 1e-10);
  CHECK(std::abs(a.g[0] - 1.0 / std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(a.g[1] - 1.0 / std::sqrt(2.0)) < 1e-10);
  const EigenPair b = perron_frobenius(LinearOperator(u, u, (Eigen::Matrix2d() << 2, 1, 1, 2).finished()));
  CHECK(std::abs(b.rho - 3.0) < 1e-10);
  CHECK(std::abs(b.g[0] - 1.0 / std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(b.gap - 1.0 / 3.0) < 1e-10);
  CHECK(b.pairing > 0.0);

  CHECK_THROWS_AS(perron_frobenius(LinearOperator(u, u, (Eigen::Matrix2d() << 1, 0, 1, 1).finished())), DomainError);
  CHECK_THROWS_AS(perron_frobenius(LinearOperator(u, share(GridMeasure::unit(3)), Eigen::MatrixXd::Ones(3, 2))),
                  ShapeError);
}

TEST_CASE("perron frobenius matches a dense eigensolver") {
  for (std::uint64_t k = 0; k < 5; ++k) {
    Rng rng = stream_rng(31, k);
    Eigen::VectorXd x(20), w(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
      x(i) = double(i);
      w(i) = uniform(rng, 0.2, 1.0);
    }
    auto mu = share(GridMeasure::line(x, w));
    Eigen::MatrixXd K(20, 20);
    for (Eigen::Index i = 0; i < K.size(); ++i) K.data()[i] = uniform(rng, 0.1, 1.0);
    const LinearOperator T = LinearOperator::from_kernel(K, mu, mu);
    const EigenPair e = perron_frobenius(T);
    const oracle::Leading o = oracle::leading_eigen(T.action(), w);
    CHECK(std::abs(e.rho - o.rho) < 1e-8 * o.rho);
    CHECK((e.g.values() - o.vector).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(e.gap - o.second / o.rho) < 1e-8);
    CHECK(e.residual < 1e-10);
  }
}

TEST_CASE("perron frobenius on the consumption model") {
  const EigenPair e = perron_frobenius(ccapm());
  CHECK(std::abs(e.delta - ccapm().design().delta0) < 1e-10);
  CHECK(e.g.values().minCoeff() > 0.0);
  CHECK(inner(e.g, ccapm().g0()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.gap < 1.0);
}
