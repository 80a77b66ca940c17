#include <cmath>
#include <string>

#include "locid/error.hpp"
#include "locid/identcore.hpp"

namespace locid {

CounterexampleF default_counterexample_f() {
  CounterexampleF out;
  out.f = [](double x) { return x * (1.0 - x) * std::exp(-x * x); };
  out.d2f = [](double x) {
    const double x2 = x * x;
    return std::exp(-x2) * (-2.0 - 6.0 * x + 10.0 * x2 + 4.0 * x2 * x - 4.0 * x2 * x2);
  };
  return out;
}

Eigen::VectorXd counterexample_weights(std::size_t terms) {
  if (terms < 2) throw DomainError("counterexample: need at least 2 terms");
  const auto n = static_cast<Eigen::Index>(terms);
  Eigen::VectorXd p(n);
  for (Eigen::Index j = 0; j < n; ++j) p(j) = std::ldexp(1.0, -static_cast<int>(j + 1));
  p(n - 1) = std::ldexp(1.0, -static_cast<int>(n - 1));
  return p;
}

namespace {

constexpr double kScanLo = -12.0, kScanHi = 12.0, kScanStep = 1e-3, kWindow = 1e-2;

double second_derivative(const CounterexampleF& f, double x) {
  if (f.d2f) return f.d2f(x);
  const double h = 1e-4;
  return (f.f(x + h) - 2.0 * f.f(x) + f.f(x - h)) / (h * h);
}

void validate_f(const CounterexampleF& f) {
  if (!f.f) throw DomainError("counterexample: invalid f: no function given");
  if (std::abs(f.f(0.0)) > 1e-14) throw DomainError("counterexample: invalid f: f(0) != 0");
  if (std::abs(f.f(1.0)) > 1e-14) throw DomainError("counterexample: invalid f: f(1) != 0");
  const double h = 1e-6;
  const double d1 = (f.f(h) - f.f(-h)) / (2.0 * h);
  if (std::abs(d1 - 1.0) > 1e-6) throw DomainError("counterexample: invalid f: f'(0) != 1");
  // Constant strict sign on each region between the admissible zeros.
  const double bounds[3][2] = {
      {kScanLo, -kWindow}, {kWindow, 1.0 - kWindow}, {1.0 + kWindow, kScanHi}};
  for (const auto& b : bounds) {
    double sign = 0.0;
    for (double x = b[0]; x <= b[1]; x += kScanStep) {
      const double v = f.f(x);
      if (v == 0.0 || !std::isfinite(v) || (sign != 0.0 && v * sign < 0.0))
        throw DomainError("counterexample: invalid f: extra zero near x = " + std::to_string(x));
      sign = v > 0.0 ? 1.0 : -1.0;
    }
  }
}

double l4_norm(const GridFunction& a) {
  const auto& w = a.measure()->weights();
  return std::pow((w.array() * a.values().array().pow(4)).sum(), 0.25);
}

}  // namespace

double counterexample_L(const CounterexampleF& f) {
  validate_f(f);
  double sup = 0.0;
  for (double x = kScanLo; x <= kScanHi; x += kScanStep)
    sup = std::max(sup, std::abs(second_derivative(f, x)));
  const double L = 0.5 * sup;
  if (!(L >= 1.0))
    throw DomainError("counterexample: measured L = " + std::to_string(L) + " is below 1");
  return L;
}

GridFunction counterexample_alpha(int k, const MeasurePtr& seq) {
  const auto n = static_cast<Eigen::Index>(seq->size());
  if (k < 1 || k >= n) throw DomainError("counterexample: k must lie in [1, terms)");
  Eigen::VectorXd a = Eigen::VectorXd::Ones(n);
  a.head(k).setZero();
  return GridFunction(seq, std::move(a));
}

CounterexampleResult counterexample(int k, const CounterexampleOptions& options) {
  CounterexampleResult out;
  out.k = k;
  out.L = counterexample_L(options.f);
  const Eigen::VectorXd p = counterexample_weights(options.terms);
  auto seq = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(p.size(), 1.0, double(p.size())), p));
  const GridFunction a = counterexample_alpha(k, seq);
  Eigen::VectorXd m = a.values().unaryExpr(options.f.f);
  out.m_norm = std::sqrt((p.array() * m.array().square()).sum());
  // Summing from the far tail keeps the partial sums of powers of two exact.
  double delta = 0.0;
  for (Eigen::Index j = p.size() - 1; j >= k; --j) delta += p(j);
  out.expected_dev_norm = std::pow(delta, 0.25);
  out.dev_norm = l4_norm(a);
  // m' is the identity, so N''' is ||alpha||_B > L ||alpha||_A^2.
  out.in_N = norm(a) > out.L * out.dev_norm * out.dev_norm;
  return out;
}

MomentMap counterexample_map(const CounterexampleOptions& options) {
  counterexample_L(options.f);
  const Eigen::VectorXd p = counterexample_weights(options.terms);
  auto seq = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(p.size(), 1.0, double(p.size())), p));
  auto f = options.f.f;
  return MomentMap(
      GridFunction::zero(seq),
      [f](const GridFunction& a) { return GridFunction(a.measure(), a.values().unaryExpr(f)); },
      LinearOperator::identity(seq), l4_norm);
}

NonlinearityBound counterexample_bound(const CounterexampleOptions& options) {
  NonlinearityBound b;
  b.L = counterexample_L(options.f);
  b.r = 2.0;
  return b;
}

std::function<GridFunction(Rng&, std::size_t)> counterexample_ball_sampler(const MeasurePtr& seq,
                                                                           double radius) {
  if (!(radius > 0.0)) throw DomainError("counterexample_ball_sampler: radius must be positive");
  const int n = static_cast<int>(seq->size());
  int kmin = 1;
  while (kmin < n - 1 && !(std::pow(2.0, -kmin / 4.0) < radius)) ++kmin;
  return [seq, radius, n, kmin](Rng& rng, std::size_t) {
    if (uniform(rng, 0.0, 1.0) < 0.5) {
      const int span = std::min(10, n - 1 - kmin);
      const int k = kmin + static_cast<int>(std::floor(uniform(rng, 0.0, span + 1.0 - 1e-12)));
      return counterexample_alpha(std::min(k, n - 1), seq);
    }
    Eigen::VectorXd a(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = uniform(rng, -1.0, 1.0);
    GridFunction g(seq, a);
    const double target = radius * uniform(rng, 0.01, 0.99);
    return g * (target / l4_norm(g));
  };
}

std::function<GridFunction(Rng&, std::size_t)> counterexample_box_sampler(const MeasurePtr& seq,
                                                                          double max_scale) {
  return [seq, max_scale](Rng& rng, std::size_t) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(seq->size()));
    const double s = uniform(rng, 0.0, max_scale);
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = s * uniform(rng, -1.0, 1.0);
    return GridFunction(seq, std::move(a));
  };
}

}  // namespace locid
