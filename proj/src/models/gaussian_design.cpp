#include "locid/models/gaussian_design.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "locid/error.hpp"
#include "locid/random.hpp"

namespace locid {

namespace {

double normal_pdf(double z, double sd) {
  const double u = z / sd;
  return std::exp(-0.5 * u * u) / (sd * boost::math::constants::root_two_pi<double>());
}

}  // namespace

GridMeasure standard_normal_axis(std::size_t n, double span) {
  const GridMeasure t = GridMeasure::trapezoid(n, -span, span);
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    w(static_cast<Eigen::Index>(i)) = t.weights()(static_cast<Eigen::Index>(i)) * normal_pdf(t.point(i), 1.0);
  w /= w.sum();
  return GridMeasure::line(t.points().col(0), w);
}

GaussianIvDesign GaussianIvDesign::scalar(double rho) {
  GaussianIvDesign d;
  d.w_dim = 1;
  d.v_loading = {rho, 0.0};
  d.sd_v = std::sqrt(1.0 - rho * rho);
  return d;
}

GaussianIvDesign GaussianIvDesign::two_dim(double rho, double b1, double b2) {
  GaussianIvDesign d = scalar(rho);
  d.w_dim = 2;
  d.x2_loading = {b1, b2};
  return d;
}

void GaussianIvDesign::validate() const {
  if (w_dim != 1 && w_dim != 2) throw DomainError("gaussian design: w_dim must be 1 or 2");
  if (!(sd_v > 0.0) || !(sd_x > 0.0)) throw DomainError("gaussian design: error sds must be positive");
  if (!(std::abs(corr) < 1.0)) throw DomainError("gaussian design: |corr| must be below 1");
  if (n_w < 2 || n_v < 3) throw DomainError("gaussian design: grids too small");
  if (!(w_span > 0.0) || v_span < 0.0) throw DomainError("gaussian design: spans must be positive");
  if (w_dim == 1 && (v_loading(1) != 0.0 || x2_loading(1) != 0.0))
    throw DomainError("gaussian design: second loadings must vanish for scalar W");
}

GaussianIvGrids::GaussianIvGrids(GaussianIvDesign design) : design_(std::move(design)) {
  design_.validate();
  const GridMeasure axis = standard_normal_axis(design_.n_w, design_.w_span);
  w_law_ = share(design_.w_dim == 1 ? axis : GridMeasure::tensor(axis, axis));
  double span = design_.v_span;
  if (span == 0.0) {
    double top = 0.0;
    for (std::size_t i = 0; i < nw(); ++i) top = std::max(top, std::abs(index_w(i)));
    span = top + 6.0 * design_.sd_v;
  }
  v_nodes_ = share(GridMeasure::trapezoid(design_.n_v, -span, span));
  const Eigen::MatrixXd P = conditional_masses();
  const Eigen::VectorXd pv = P.transpose() * w_law_->weights();
  v_law_ = share(GridMeasure::line(v_nodes_->points().col(0), pv));
}

double GaussianIvGrids::index_w(std::size_t iw) const {
  double s = design_.v_loading(0) * w_law_->point(iw, 0);
  if (design_.w_dim == 2) s += design_.v_loading(1) * w_law_->point(iw, 1);
  return s;
}

Eigen::MatrixXd GaussianIvGrids::conditional_masses(double d) const {
  const GaussianIvDesign& g = design_;
  const double var = g.sd_v * g.sd_v + 2.0 * d * g.corr * g.sd_v * g.sd_x + d * d * g.sd_x * g.sd_x;
  const double sd = std::sqrt(var);
  const auto nW = static_cast<Eigen::Index>(nw()), nV = static_cast<Eigen::Index>(nv());
  Eigen::MatrixXd P(nW, nV);
  for (Eigen::Index i = 0; i < nW; ++i) {
    const auto iw = static_cast<std::size_t>(i);
    double mean = index_w(iw) + d * g.x2_loading(0) * w_law_->point(iw, 0);
    if (g.w_dim == 2) mean += d * g.x2_loading(1) * w_law_->point(iw, 1);
    for (Eigen::Index j = 0; j < nV; ++j)
      P(i, j) = v_nodes_->weights()(j) * normal_pdf(v_nodes_->point(std::size_t(j)) - mean, sd);
    const double mass = P.row(i).sum();
    if (mass < 0.999)
      throw DomainError("index V + " + std::to_string(d) +
                        " X2 leaves the tabulated g-domain at W node " + std::to_string(iw) +
                        " (captured mass " + std::to_string(mass) + ")");
    P.row(i) /= mass;
  }
  return P;
}

Eigen::MatrixXd GaussianIvGrids::x2_mean() const {
  const GaussianIvDesign& g = design_;
  const double slope = g.corr * g.sd_x / g.sd_v;
  Eigen::MatrixXd E(static_cast<Eigen::Index>(nw()), static_cast<Eigen::Index>(nv()));
  const Eigen::VectorXd bw = x2_given_w();
  for (Eigen::Index i = 0; i < E.rows(); ++i) {
    const double aw = index_w(std::size_t(i));
    for (Eigen::Index j = 0; j < E.cols(); ++j)
      E(i, j) = bw(i) + slope * (v_nodes_->point(std::size_t(j)) - aw);
  }
  return E;
}

Eigen::VectorXd GaussianIvGrids::x2_given_w() const {
  Eigen::VectorXd bw(static_cast<Eigen::Index>(nw()));
  for (std::size_t i = 0; i < nw(); ++i) {
    double s = design_.x2_loading(0) * w_law_->point(i, 0);
    if (design_.w_dim == 2) s += design_.x2_loading(1) * w_law_->point(i, 1);
    bw(static_cast<Eigen::Index>(i)) = s;
  }
  return bw;
}

std::vector<GaussianIvDesign> random_designs(std::size_t count, std::uint64_t seed) {
  std::vector<GaussianIvDesign> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = stream_rng(seed, i);
    const double kind = uniform(rng, 0.0, 1.0);
    const double rho = kind < 0.15 ? 0.0 : uniform(rng, 0.3, 0.8);
    const double b1 = uniform(rng, -0.8, 0.8);
    GaussianIvDesign d = uniform(rng, 0.0, 1.0) < 0.5
                             ? GaussianIvDesign::scalar(rho)
                             : GaussianIvDesign::two_dim(rho, b1, uniform(rng, 0.3, 0.8));
    if (d.w_dim == 1) d.x2_loading = {b1, 0.0};
    d.corr = uniform(rng, -0.6, 0.6);
    out.push_back(d);
  }
  return out;
}

}  // namespace locid
