#include "locid/models/quantile.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "locid/error.hpp"

namespace locid {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

Eigen::VectorXd normalised_density(const GridMeasure& nodes, double mean, double sd) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    p(static_cast<Eigen::Index>(i)) = std_normal_pdf((nodes.point(i) - mean) / sd) / sd;
  return p / nodes.weights().dot(p);
}

LinearOperator placeholder() {
  auto one = share(GridMeasure::unit(1));
  return LinearOperator::zero(one, one);
}

}  // namespace

void QuantileDesign::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("quantile design: tau must lie in (0, 1)");
  if (nx < 3 || nw < 2 || ny_half < 2) throw DomainError("quantile design: grids too small");
  if (!(sd_eta > 0.0) || !(s0 > 0.0)) throw DomainError("quantile design: scales must be positive");
  if (!(std::abs(s_het) < 1.0)) throw DomainError("quantile design: |s_het| must be below 1");
  if (!(x_span > 0.0) || !(w_span > 0.0) || !(y_span > 0.0))
    throw DomainError("quantile design: spans must be positive");
}

QuantileIvModel::QuantileIvModel(QuantileDesign design)
    : design_(std::move(design)), derivative_(placeholder()), alpha0_(GridFunction::zero(share(GridMeasure::unit(1)))) {
  if (!design_.alpha0) design_.alpha0 = [](double x) { return 0.5 * x + 0.3 * std::sin(2.0 * x); };
  design_.validate();
  const QuantileDesign& d = design_;
  z_tau_ = boost::math::quantile(boost::math::normal(), d.tau);
  const double s_max = d.s0 * (1.0 + std::abs(d.s_het));
  ny_ = 2 * d.ny_half + 1;
  step_ = d.y_span * s_max / static_cast<double>(d.ny_half);

  auto xg = share(GridMeasure::trapezoid(d.nx, -d.x_span, d.x_span));
  auto wg = share(GridMeasure::trapezoid(d.nw, -d.w_span, d.w_span));
  x_nodes_ = xg->points().col(0);
  w_nodes_ = wg->points().col(0);

  const Eigen::VectorXd pw = normalised_density(*wg, 0.0, 1.0);
  JointDensity joint{xg, wg, Eigen::MatrixXd(d.nx, d.nw)};
  for (std::size_t j = 0; j < d.nw; ++j) {
    const Eigen::VectorXd px = normalised_density(*xg, d.pi * w_nodes_(Eigen::Index(j)), d.sd_eta);
    joint.density.col(Eigen::Index(j)) = px * pw(Eigen::Index(j));
  }
  x_given_w_.resize(Eigen::Index(d.nw), Eigen::Index(d.nx));
  for (Eigen::Index j = 0; j < x_given_w_.rows(); ++j)
    x_given_w_.row(j) = (xg->weights().cwiseProduct(joint.density.col(j)) / pw(j)).transpose();

  F_.resize(d.nx * d.nw * ny_);
  f_.resize(F_.size());
  Eigen::MatrixXd a(Eigen::Index(d.nx), Eigen::Index(d.nw));
  for (std::size_t ix = 0; ix < d.nx; ++ix) {
    for (std::size_t iw = 0; iw < d.nw; ++iw) {
      const double s = scale(ix, iw);
      const std::size_t o = offset(ix, iw);
      for (std::size_t k = 0; k < ny_; ++k) {
        const double u = (static_cast<double>(k) - static_cast<double>(d.ny_half)) * step_ / s + z_tau_;
        F_[o + k] = std_normal_cdf(u);
        f_[o + k] = std_normal_pdf(u) / s;
      }
      F_[o + d.ny_half] = d.tau;
      a(Eigen::Index(ix), Eigen::Index(iw)) = f_[o + d.ny_half];
    }
  }

  derivative_ = conditional_expectation_between_laws(joint, a);
  alpha0_ = GridFunction::tabulate(derivative_.domain(), d.alpha0);

  // sup |F''|: the Hermite second derivative is linear on each cell.
  const double h = step_;
  for (std::size_t o = 0; o + 1 < F_.size(); ++o) {
    if ((o + 1) % ny_ == 0) continue;
    const double dF = (F_[o + 1] - F_[o]) / (h * h);
    const double left = 6.0 * dF - (4.0 * f_[o] + 2.0 * f_[o + 1]) / h;
    const double right = -6.0 * dF + (2.0 * f_[o] + 4.0 * f_[o + 1]) / h;
    L1_ = std::max({L1_, std::abs(left), std::abs(right)});
  }
  const Eigen::VectorXd fx = x_marginal(joint);
  for (Eigen::Index ix = 0; ix < joint.density.rows(); ++ix)
    for (Eigen::Index iw = 0; iw < joint.density.cols(); ++iw)
      L2_ = std::max(L2_, joint.density(ix, iw) / pw(iw) / fx(ix));
}

double QuantileIvModel::scale(std::size_t ix, std::size_t iw) const {
  const double eta = x_nodes_(Eigen::Index(ix)) - design_.pi * w_nodes_(Eigen::Index(iw));
  return design_.s0 * (1.0 + design_.s_het * std::tanh(eta));
}

double QuantileIvModel::y_min(std::size_t ix) const {
  return design_.alpha0(x_nodes_(Eigen::Index(ix))) - static_cast<double>(design_.ny_half) * step_;
}

double QuantileIvModel::y_max(std::size_t ix) const {
  return design_.alpha0(x_nodes_(Eigen::Index(ix))) + static_cast<double>(design_.ny_half) * step_;
}

QuantileIvModel::Cell QuantileIvModel::locate(std::size_t ix, double y) const {
  const double u = (y - y_min(ix)) / step_;
  if (!(u >= -1e-12) || !(u <= static_cast<double>(ny_ - 1) + 1e-12))
    throw DomainError("quantile model: y = " + std::to_string(y) + " at x node " + std::to_string(ix) +
                      " requires extrapolation beyond the tabulated y-knots");
  std::size_t k = static_cast<std::size_t>(std::max(0.0, std::floor(u)));
  k = std::min(k, ny_ - 2);
  return {k, std::clamp(u - static_cast<double>(k), 0.0, 1.0)};
}

double QuantileIvModel::cdf(std::size_t ix, std::size_t iw, double y) const {
  const Cell c = locate(ix, y);
  const std::size_t o = offset(ix, iw) + c.k;
  const double t = c.t, t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * F_[o] + (t3 - 2 * t2 + t) * step_ * f_[o] +
         (-2 * t3 + 3 * t2) * F_[o + 1] + (t3 - t2) * step_ * f_[o + 1];
}

double QuantileIvModel::pdf(std::size_t ix, std::size_t iw, double y) const {
  const Cell c = locate(ix, y);
  const std::size_t o = offset(ix, iw) + c.k;
  const double t = c.t, t2 = t * t;
  return (6 * t2 - 6 * t) * (F_[o] - F_[o + 1]) / step_ + (3 * t2 - 4 * t + 1) * f_[o] +
         (3 * t2 - 2 * t) * f_[o + 1];
}

double QuantileIvModel::cdf_exact(std::size_t ix, std::size_t iw, double y) const {
  const double a0 = design_.alpha0(x_nodes_(Eigen::Index(ix)));
  return std_normal_cdf((y - a0) / scale(ix, iw) + z_tau_);
}

GridFunction QuantileIvModel::eval(const GridFunction& alpha) const {
  if (!same_measure(alpha.measure(), x_law()))
    throw ShapeError("quantile model: alpha must live on the law of X");
  Eigen::VectorXd out(Eigen::Index(design_.nw));
  for (std::size_t iw = 0; iw < design_.nw; ++iw) {
    double s = 0.0;
    for (std::size_t ix = 0; ix < design_.nx; ++ix)
      s += x_given_w_(Eigen::Index(iw), Eigen::Index(ix)) * cdf(ix, iw, alpha[ix]);
    out(Eigen::Index(iw)) = s - design_.tau;
  }
  return GridFunction(w_law(), out);
}

GridFunction QuantileIvModel::random_deviation(Rng& rng, double size) const {
  double c[6];
  for (int k = 0; k < 6; ++k) c[k] = gaussian(rng) / (1.0 + k);
  const double span = design_.x_span;
  GridFunction d = GridFunction::tabulate(x_law(), [&](double x) {
    double s = 0.0;
    for (int k = 0; k < 6; ++k) s += c[k] * std::cos(k * M_PI * (x + span) / (2.0 * span));
    return s;
  });
  return d * (size / norm(d));
}

MomentMap QuantileIvModel::moment_map() const {
  auto self = std::make_shared<const QuantileIvModel>(*this);
  return MomentMap(alpha0_, [self](const GridFunction& a) { return self->eval(a); }, derivative_);
}

NonlinearityBound QuantileIvModel::bound() const {
  NonlinearityBound b;
  b.L = L1_ * L2_;
  b.r = 2.0;
  return b;
}

}  // namespace locid
