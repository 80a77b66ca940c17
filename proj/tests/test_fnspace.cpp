#include <doctest.h>

#include <sstream>

#include "locid/error.hpp"
#include "locid/fnspace.hpp"

using namespace locid;

namespace {

MeasurePtr two_point(double w0, double w1) {
  return share(GridMeasure::line(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(w0, w1)));
}

GridFunction fn(const MeasurePtr& mu, std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x(i++) = a;
  return GridFunction(mu, x);
}

}  // namespace

TEST_CASE("grid measures") {
  const GridMeasure u = GridMeasure::uniform_probability(4);
  CHECK(u.probability());
  CHECK(u.point(0) == doctest::Approx(0.125));
  CHECK(u.weights()(3) == doctest::Approx(0.25));

  const GridMeasure t = GridMeasure::trapezoid(3, 0.0, 1.0);
  CHECK(t.weights()(0) == doctest::Approx(0.25));
  CHECK(t.weights()(1) == doctest::Approx(0.5));
  CHECK(t.total_mass() == doctest::Approx(1.0));

  const GridMeasure p = GridMeasure::tensor(GridMeasure::uniform_probability(2), GridMeasure::trapezoid(3, 0, 1));
  CHECK(p.size() == 6);
  CHECK(p.dim() == 2);
  CHECK(p.weights()(1) == doctest::Approx(0.5 * 0.5));
  CHECK(p.point(1, 0) == doctest::Approx(0.25));
  CHECK(p.point(1, 1) == doctest::Approx(0.5));

  const GridMeasure a = u.with_atoms(2);
  CHECK(a.size() == 6);
  CHECK(a.weights()(5) == doctest::Approx(1.0));
  CHECK_FALSE(a.probability());
}

TEST_CASE("grid measure errors") {
  CHECK_THROWS_AS(GridMeasure::line(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)), DomainError);
  CHECK_THROWS_AS(GridMeasure::line(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 0)), DomainError);
  CHECK_THROWS_AS(GridMeasure::line(Eigen::Vector2d(0, 1), Eigen::Vector3d(1, 1, 1)), ShapeError);
  CHECK_THROWS_AS(GridMeasure::uniform_probability(0), DomainError);
  auto mu = two_point(0.5, 0.5);
  CHECK_THROWS_AS(GridFunction(mu, Eigen::Vector3d(1, 2, 3)), ShapeError);
}

TEST_CASE("inner products") {
  auto mu = two_point(0.5, 0.5);
  CHECK(inner(fn(mu, {1, -1}), fn(mu, {1, 1})) == doctest::Approx(0.0));
  CHECK(inner(fn(mu, {1, 1}), fn(mu, {1, 1})) == doctest::Approx(1.0));
  auto nu = two_point(0.25, 0.75);
  CHECK(inner(fn(nu, {1, 2}), fn(nu, {3, 4})) == doctest::Approx(6.75));
  auto other = share(GridMeasure::uniform_probability(3));
  CHECK_THROWS_AS(inner(fn(mu, {1, 1}), GridFunction::constant(other, 1.0)), ShapeError);
  CHECK_THROWS_AS(inner(fn(mu, {1, 1}), fn(other, {1, 1, 1}), *mu), ShapeError);
}

TEST_CASE("gram schmidt") {
  auto mu = two_point(0.5, 0.5);
  const GramSchmidtResult r = gram_schmidt({fn(mu, {1, 1}), fn(mu, {1, 0})}, mu);
  REQUIRE(r.basis.size() == 2);
  CHECK(r.dropped.empty());
  CHECK(r.basis.element(0)[0] == doctest::Approx(1.0));
  CHECK(r.basis.element(0)[1] == doctest::Approx(1.0));
  CHECK(std::abs(r.basis.element(1)[0]) == doctest::Approx(1.0));
  CHECK(r.basis.element(1)[0] == doctest::Approx(-r.basis.element(1)[1]));

  const GramSchmidtResult c = gram_schmidt({fn(mu, {1, 1}), fn(mu, {2, 2})}, mu, 1e-10);
  CHECK(c.basis.size() == 1);
  REQUIRE(c.dropped.size() == 1);
  CHECK(c.dropped[0] == 1);

  const GramSchmidtResult again = gram_schmidt({r.basis.element(0), r.basis.element(1)}, mu);
  for (std::size_t j = 0; j < 2; ++j)
    CHECK(std::abs(inner(again.basis.element(j), r.basis.element(j))) == doctest::Approx(1.0));

  CHECK(gram_schmidt({}, mu).basis.empty());
}

TEST_CASE("projection and coefficients") {
  auto mu = two_point(0.5, 0.5);
  OrthonormalBasis one(mu, std::vector<GridFunction>{fn(mu, {1, 1})});
  const GridFunction p = project(fn(mu, {1, 0}), one);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
  CHECK(norm(project(fn(mu, {1, -1}), one)) == doctest::Approx(0.0));
  CHECK(norm(project(fn(mu, {3, 3}), one) - fn(mu, {3, 3})) < 1e-12);
  CHECK(norm(project(fn(mu, {1, 2}), OrthonormalBasis(mu))) == 0.0);

  OrthonormalBasis two(mu, std::vector<GridFunction>{fn(mu, {1, 1}), fn(mu, {1, -1})});
  const Eigen::VectorXd c = fourier_coeffs(fn(mu, {1, 2}), two);
  CHECK(c(0) == doctest::Approx(1.5));
  CHECK(c(1) == doctest::Approx(-0.5));
  CHECK(fourier_coeffs(GridFunction::zero(mu), two).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd e = fourier_coeffs(two.element(1), two);
  CHECK(e(0) == doctest::Approx(0.0));
  CHECK(e(1) == doctest::Approx(1.0));
  CHECK(norm(synthesize(c, two) - fn(mu, {1, 2})) < 1e-12);

  auto other = share(GridMeasure::uniform_probability(2, 5.0, 6.0));
  CHECK_THROWS_AS(project(GridFunction::constant(other, 1.0), one), ShapeError);
}

TEST_CASE("orthonormal basis validation") {
  auto mu = two_point(0.5, 0.5);
  CHECK_THROWS_AS(OrthonormalBasis(mu, std::vector<GridFunction>{fn(mu, {1, 0})}), DomainError);
}

TEST_CASE("cosine basis is orthonormal") {
  auto grid = share(GridMeasure::uniform_probability(16));
  const OrthonormalBasis b = cosine_basis(grid, 16);
  const Eigen::MatrixXd G = b.matrix().transpose() * grid->weights().asDiagonal() * b.matrix();
  CHECK((G - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b.sup_norm() == b.matrix().cwiseAbs().maxCoeff());
  CHECK(b.sup_norm() <= std::sqrt(2.0));
  CHECK_THROWS_AS(cosine_basis(grid, 17), DomainError);
}

TEST_CASE("csv round trip") {
  auto mu = share(GridMeasure::tensor(GridMeasure::uniform_probability(3), GridMeasure::trapezoid(2, 0, 1)));
  std::stringstream ms;
  write_csv(ms, *mu);
  auto back = share(read_measure_csv(ms));
  CHECK(*back == *mu);
  const GridFunction f = GridFunction::tabulate2(mu, [](double x, double y) { return x + 10 * y; });
  std::stringstream fs;
  write_csv(fs, f);
  const GridFunction g = read_function_csv(fs, back);
  CHECK((g.values() - f.values()).cwiseAbs().maxCoeff() < 1e-12);
}
