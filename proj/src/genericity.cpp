#include "locid/genericity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "locid/error.hpp"
#include "locid/random.hpp"

namespace locid {

GeneratorConfig GeneratorConfig::power_law(std::size_t trunc_N, double power) {
  GeneratorConfig c;
  c.trunc_N = trunc_N;
  c.sigma_power = power;
  c.sigma.resize(static_cast<Eigen::Index>(trunc_N));
  for (std::size_t j = 0; j < trunc_N; ++j)
    c.sigma(static_cast<Eigen::Index>(j)) = std::pow(static_cast<double>(j + 1), -power);
  return c;
}

void GeneratorConfig::validate() const {
  if (trunc_N < 1) throw DomainError("generator: trunc_N must be >= 1");
  if (static_cast<std::size_t>(sigma.size()) < trunc_N)
    throw DomainError("generator: sigma has fewer than trunc_N entries");
  for (Eigen::Index j = 0; j < sigma.size(); ++j)
    if (!(sigma(j) > 0.0) || !std::isfinite(sigma(j)))
      throw DomainError("generator: sigma[" + std::to_string(j) + "] must be positive");
  if (!(kappa > 0.0)) throw DomainError("generator: kappa must be positive");
  if (density && !positive) throw DomainError("generator: density flag requires the positive flag");
  if (c && !(*c > 1.0)) throw DomainError("generator: c must exceed 1");
  if (compact && trunc_N >= 4) {
    // Least-squares slope of log sigma against log(j+1) over the upper half.
    const std::size_t lo = trunc_N / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(trunc_N - lo);
    for (std::size_t j = lo; j < trunc_N; ++j) {
      const double x = std::log(static_cast<double>(j + 1));
      const double y = std::log(sigma(static_cast<Eigen::Index>(j)));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(slope < -0.5))
      throw DomainError("generator: compact flag needs square-summable sigma, tail decay rate " +
                        std::to_string(-slope) + " <= 0.5");
  }
}

double GeneratorConfig::tail_mass() const {
  if (!sigma_power) {
    double t = 0.0;
    for (Eigen::Index j = static_cast<Eigen::Index>(trunc_N); j < sigma.size(); ++j)
      t += sigma(j) * sigma(j);
    return sigma.size() > static_cast<Eigen::Index>(trunc_N) ? t
                                                             : std::numeric_limits<double>::quiet_NaN();
  }
  const double p = 2.0 * *sigma_power;
  if (!(p > 1.0)) return std::numeric_limits<double>::infinity();
  // sum_{k = N+1}^{M} k^{-p} plus the integral tail beyond M + 1/2.
  const double M = static_cast<double>(trunc_N) + 100000.0;
  double t = 0.0;
  for (double k = static_cast<double>(trunc_N) + 1.0; k <= M; k += 1.0) t += std::pow(k, -p);
  t += std::pow(M + 0.5, 1.0 - p) / (p - 1.0);
  return t;
}

OperatorBases default_bases(std::size_t n) {
  auto grid = share(GridMeasure::uniform_probability(n));
  OrthonormalBasis b = cosine_basis(grid, n);
  return {b, b};
}

namespace {

void require_bounded(const OrthonormalBasis& b, double c, const char* side) {
  const Eigen::MatrixXd& M = b.matrix();
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double s = M.col(j).cwiseAbs().maxCoeff();
    if (s > c)
      throw DomainError(std::string("positivity construction: ") + side + " basis element " +
                        std::to_string(j) + " has sup " + std::to_string(s) + " > c = " +
                        std::to_string(c));
  }
  if ((M.col(0).array() - 1.0).abs().maxCoeff() > 1e-12)
    throw DomainError(std::string("positivity construction: ") + side +
                      " basis element 0 is not the constant 1");
}

}  // namespace

RandomOperatorDraw draw_operator(const GeneratorConfig& config, const OperatorBases& bases,
                                 std::uint64_t seed, std::uint64_t index) {
  config.validate();
  const std::size_t N = config.trunc_N;
  if (bases.phi.size() < N || bases.psi.size() < N)
    throw DomainError("draw_operator: bases have fewer than trunc_N elements");
  const auto n = static_cast<Eigen::Index>(N);
  const Eigen::MatrixXd phi = bases.phi.matrix().leftCols(n);
  const Eigen::MatrixXd psi = bases.psi.matrix().leftCols(n);

  Rng rng = stream_rng(seed, index);
  Eigen::VectorXd u(n);
  if (config.dependent_u) u.setConstant(uniform(rng, -1.0, 1.0));
  else
    for (Eigen::Index j = 0; j < n; ++j) u(j) = uniform(rng, -1.0, 1.0);
  Eigen::VectorXd lambda = u.cwiseProduct(config.sigma.head(n));

  double kappa = config.kappa;
  double c = 0.0;
  if (config.positive) {
    c = config.c ? *config.c : 1.1 * std::max(bases.phi.sup_norm(), bases.psi.sup_norm());
    require_bounded(bases.phi, c, "phi");
    require_bounded(bases.psi, c, "psi");
    // |sum_{j>=1} lambda_j psi_j phi_j| <= c^2 sum |lambda_j|, so lambda_0 dominates it.
    lambda(0) = c * c * lambda.tail(n - 1).cwiseAbs().sum() + std::abs(u(0)) * config.sigma(0);
    if (config.density) kappa = 1.0 / lambda(0);
  }
  Eigen::MatrixXd K = kappa * psi * lambda.asDiagonal() * phi.transpose();
  LinearOperator op = LinearOperator::from_kernel(K, bases.phi.measure(), bases.psi.measure());
  if (config.density) {
    const Eigen::VectorXd rows = op.action().rowwise().sum();
    const double err = (rows.array() - 1.0).abs().maxCoeff();
    if (err > 1e-12)
      throw NumericError("draw_operator: density rows sum to 1 only within " + std::to_string(err));
  }
  return {std::move(op), std::move(K), std::move(lambda), kappa, c, seed, index};
}

InjectivityReport mc_injectivity(const GeneratorConfig& config, std::size_t draws, double tol,
                                 std::uint64_t seed, const std::optional<OperatorBases>& bases) {
  if (draws < 1) throw DomainError("mc_injectivity: draws must be >= 1");
  if (!(tol >= 0.0)) throw DomainError("mc_injectivity: tol must be nonnegative");
  const OperatorBases b = bases ? *bases : default_bases(config.trunc_N);
  InjectivityReport rep;
  rep.draws = draws;
  rep.tail_mass = config.tail_mass();
  rep.min_kernel = std::numeric_limits<double>::infinity();
  rep.max_lambda_excess = -std::numeric_limits<double>::infinity();
  std::size_t below = 0;
  const auto n = static_cast<Eigen::Index>(config.trunc_N);
  for (std::size_t i = 0; i < draws; ++i) {
    const RandomOperatorDraw d = draw_operator(config, b, seed, i);
    const SvdDecomposition s = d.op.svd();
    const double smin = sigma_min(s, d.op.domain()->size());
    rep.sigma_min.push_back(smin);
    const double mu1 = s.singular_values.size() ? s.singular_values(0) : 0.0;
    if (!(smin > tol * mu1)) ++below;

    Eigen::VectorXd expect = (d.kappa * d.lambdas).cwiseAbs();
    std::sort(expect.data(), expect.data() + expect.size(), std::greater<double>());
    const Eigen::Index k = std::min(expect.size(), s.singular_values.size());
    rep.max_singular_mismatch = std::max(
        rep.max_singular_mismatch, (s.singular_values.head(k) - expect.head(k)).cwiseAbs().maxCoeff());

    const Eigen::Index first = config.positive ? 1 : 0;
    for (Eigen::Index j = first; j < n; ++j)
      rep.max_lambda_excess =
          std::max(rep.max_lambda_excess, std::abs(d.lambdas(j)) - config.sigma(j));
    rep.min_kernel = std::min(rep.min_kernel, d.kernel.minCoeff());
    if (config.density) {
      const Eigen::VectorXd rows = d.op.action().rowwise().sum();
      rep.max_row_sum_error = std::max(rep.max_row_sum_error, (rows.array() - 1.0).abs().maxCoeff());
    }
  }
  if (rep.max_lambda_excess == -std::numeric_limits<double>::infinity()) rep.max_lambda_excess = 0.0;
  rep.fraction_below_tol = static_cast<double>(below) / static_cast<double>(draws);
  return rep;
}

}  // namespace locid
