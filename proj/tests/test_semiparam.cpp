#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "locid/error.hpp"
#include "locid/random.hpp"
#include "locid/semiparam.hpp"

using namespace locid;

namespace {

// B-grid of two points with weights 0.5, range(m_g) = span{[1, 1]}, one column b = [1, 0].
SplitDerivative two_point_split() {
  auto b = share(GridMeasure::line(Eigen::Vector2d(0, 1), Eigen::Vector2d(0.5, 0.5)));
  auto g = share(GridMeasure::unit(1));
  LinearOperator mg(g, b, Eigen::Vector2d(1.0, 1.0));
  return {{GridFunction(b, Eigen::Vector2d(1.0, 0.0))}, mg};
}

// Linear model m(beta, g) = m_beta (beta - 1) + m_g g on the given split.
SemiparametricModel linear_model(const SplitDerivative& s) {
  SemiparametricModel m{.beta0 = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.p())),
                        .g0 = GridFunction::zero(s.m_g.domain()),
                        .eval = {},
                        .split = s,
                        .g_norm = {},
                        .g_directions = {}};
  m.eval = [s](const Eigen::VectorXd& beta, const GridFunction& g) {
    return s.apply(beta - Eigen::VectorXd::Ones(beta.size()), g);
  };
  return m;
}

}  // namespace

TEST_CASE("two point partialling out") {
  const SplitDerivative s = two_point_split();
  const PiReport r = partial_out(s);
  REQUIRE(r.pi.rows() == 1);
  CHECK(r.pi(0, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.zeta_star[0][0] == doctest::Approx(0.5));
  CHECK(r.zeta_star[0][1] == doctest::Approx(0.5));
  CHECK(std::abs(r.eps1 - 0.35355339059327373) < 1e-9);
  CHECK(r.eps >= 0.1767);

  const InequalityCheck a2 = split_inequality_check(s, r, 10000, 1);
  CHECK(a2.violations == 0);
  CHECK(a2.min_ratio >= 0.1767);
  const InequalityCheck a1 = partialled_inequality_check(s, r, 10000, 1);
  CHECK(a1.violations == 0);
}

TEST_CASE("orthogonal and absorbed columns") {
  auto b = share(GridMeasure::uniform_probability(4));
  auto g = share(GridMeasure::unit(2));
  Eigen::MatrixXd A(4, 2);
  A << 1, 0, 1, 0, 0, 1, 0, 1;
  const LinearOperator mg(g, b, A);
  const GridFunction orth(b, Eigen::Vector4d(1, -1, 2, -2));
  const PiReport o = partial_out({{orth}, mg});
  CHECK(norm(o.zeta_star[0]) < 1e-12);
  CHECK(o.pi(0, 0) == doctest::Approx(inner(orth, orth)));

  const GridFunction inside(b, Eigen::Vector4d(3, 3, -1, -1));
  const PiReport in = partial_out({{inside, orth}, mg});
  CHECK(std::abs(in.pi(0, 0)) < 1e-12);
  CHECK(in.lambda_min == 0.0);
  CHECK_FALSE(in.nonsingular(1e-8));
}

TEST_CASE("pi quadratic form bounds the beta block") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const SplitDerivative s = random_split(4, i, 3, 12);
    const PiReport r = partial_out(s);
    if (!(r.lambda_min > 0.0)) continue;
    const Eigen::Index p = static_cast<Eigen::Index>(s.p());
    Rng rng = stream_rng(5, i);
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd a(p);
      for (Eigen::Index k = 0; k < p; ++k) a(k) = gaussian(rng);
      a.normalize();
      CHECK(norm(s.apply_beta(a)) >= r.eps);
      CHECK(a.dot(r.pi * a) >= r.lambda_min * (1 - 1e-9));
    }
  }
}

TEST_CASE("random splits never violate the inequalities") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const SplitDerivative s = random_split(17, i, 3, 16);
    const PiReport r = partial_out(s);
    CHECK(split_inequality_check(s, r, 2000, i).violations == 0);
    CHECK(partialled_inequality_check(s, r, 2000, i).violations == 0);
  }
}

TEST_CASE("linear semiparametric harness") {
  auto b = share(GridMeasure::uniform_probability(6));
  auto g = share(GridMeasure::unit(3));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 3);
  A(0, 0) = A(1, 1) = A(2, 2) = 1.0;
  const LinearOperator mg(g, b, A);
  const GridFunction col(b, (Eigen::VectorXd(6) << 0.5, 0, 0, 1, 2, 1).finished());
  const SemiparametricModel ok = linear_model({{col}, mg});
  CHECK(check_linear_in_g(ok, 1e-12, 1));
  SemiparamOptions opt;
  opt.samples = 100;
  const SemiparamReport r = verify_linear_in_g(ok, opt);
  CHECK(r.passed());
  CHECK(r.pi_nonsingular);
  CHECK(r.beta_samples > 0);
  CHECK(r.g_only_samples > 0);
  CHECK(r.g_rank_holds);

  const GridFunction absorbed(b, (Eigen::VectorXd(6) << 1, 2, 3, 0, 0, 0).finished());
  const SemiparamReport gated = verify_linear_in_g(linear_model({{absorbed}, mg}), opt);
  CHECK(gated.precondition_failed);
  CHECK(gated.beta_samples == 0);
  CHECK_FALSE(gated.passed());
  CHECK_FALSE(gated.diagnostic.empty());
}

TEST_CASE("moment map on the direct sum") {
  const SplitDerivative s = two_point_split();
  const MomentMap m = linear_model(s).to_moment_map();
  CHECK(m.base_point().size() == 2);
  CHECK(norm(m.eval(m.base_point())) == 0.0);
  const GridFunction d(m.base_point().measure(), Eigen::Vector2d(0.3, -0.2));
  CHECK(norm(m.eval_at_deviation(d) - m.derivative().apply(d)) < 1e-15);
  CHECK(m.domain_norm(d) == doctest::Approx(std::sqrt(0.09 + 0.04)));
}

TEST_CASE("shape errors") {
  SplitDerivative s = two_point_split();
  CHECK_THROWS_AS(s.apply_beta(Eigen::Vector2d(1, 1)), ShapeError);
  s.m_beta.push_back(GridFunction::zero(share(GridMeasure::unit(3))));
  CHECK_THROWS_AS(partial_out(s), ShapeError);
  CHECK_THROWS_AS(partial_out({{}, two_point_split().m_g}), DomainError);
}
