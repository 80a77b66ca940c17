#include "locid/fnspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "csv_util.hpp"
#include "locid/error.hpp"

namespace locid {

namespace {

void check_points_distinct(const Eigen::MatrixXd& pts) {
  const Eigen::Index n = pts.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < pts.cols(); ++c) {
      if (pts(a, c) != pts(b, c)) return pts(a, c) < pts(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!less(order[i - 1], order[i]))
      throw DomainError("GridMeasure: duplicate support point at index " +
                        std::to_string(order[i]));
  }
}

}  // namespace

GridMeasure::GridMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.cols() != 1 && points_.cols() != 2)
    throw ShapeError("GridMeasure: points must be 1-D or 2-D, got dimension " +
                     std::to_string(points_.cols()));
  if (points_.rows() != weights_.size())
    throw ShapeError("GridMeasure: " + std::to_string(points_.rows()) + " points but " +
                     std::to_string(weights_.size()) + " weights");
  if (!points_.allFinite()) throw DomainError("GridMeasure: non-finite support point");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_(i) > 0.0) || !std::isfinite(weights_(i)))
      throw DomainError("GridMeasure: weight " + std::to_string(i) + " is not a positive finite number");
  }
  check_points_distinct(points_);
  probability_ = std::abs(weights_.sum() - 1.0) <= kProbabilityTol;
}

GridMeasure GridMeasure::line(const Eigen::VectorXd& points, const Eigen::VectorXd& weights) {
  return GridMeasure(Eigen::MatrixXd(points), weights);
}

GridMeasure GridMeasure::uniform_probability(std::size_t n, double a, double b) {
  if (n == 0) throw DomainError("uniform_probability: n must be positive");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXd x(N);
  const double h = (b - a) / static_cast<double>(n);
  for (Eigen::Index i = 0; i < N; ++i) x(i) = a + (static_cast<double>(i) + 0.5) * h;
  return line(x, Eigen::VectorXd::Constant(N, 1.0 / static_cast<double>(n)));
}

GridMeasure GridMeasure::trapezoid(std::size_t n, double a, double b) {
  if (n < 2) throw DomainError("trapezoid: need at least 2 nodes");
  if (!(b > a)) throw DomainError("trapezoid: empty interval");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(N, a, b);
  const double h = (b - a) / static_cast<double>(n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(N, h);
  w(0) = w(N - 1) = 0.5 * h;
  return line(x, w);
}

GridMeasure GridMeasure::unit(std::size_t n) {
  const auto N = static_cast<Eigen::Index>(n);
  return line(Eigen::VectorXd::LinSpaced(N, 0.0, static_cast<double>(n) - 1.0),
              Eigen::VectorXd::Ones(N));
}

GridMeasure GridMeasure::tensor(const GridMeasure& x, const GridMeasure& y) {
  if (x.dim() != 1 || y.dim() != 1) throw ShapeError("tensor: factors must be 1-D");
  const Eigen::Index nx = x.weights().size(), ny = y.weights().size();
  Eigen::MatrixXd pts(nx * ny, 2);
  Eigen::VectorXd w(nx * ny);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < ny; ++j) {
      const Eigen::Index k = i * ny + j;
      pts(k, 0) = x.points()(i, 0);
      pts(k, 1) = y.points()(j, 0);
      w(k) = x.weights()(i) * y.weights()(j);
    }
  }
  return GridMeasure(std::move(pts), std::move(w));
}

GridMeasure GridMeasure::with_atoms(std::size_t atoms) const {
  const Eigen::Index n = points_.rows();
  const auto a = static_cast<Eigen::Index>(atoms);
  Eigen::MatrixXd pts(n + a, points_.cols());
  Eigen::VectorXd w(n + a);
  pts.topRows(n) = points_;
  w.head(n) = weights_;
  const double beyond = n > 0 ? points_.col(0).maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < a; ++k) {
    pts.row(n + k).setZero();
    pts(n + k, 0) = beyond + 1.0 + static_cast<double>(k);
    w(n + k) = 1.0;
  }
  return GridMeasure(std::move(pts), std::move(w));
}

GridMeasure GridMeasure::reweighted(const Eigen::VectorXd& factors) const {
  if (factors.size() != weights_.size()) throw ShapeError("reweighted: size mismatch");
  return GridMeasure(points_, weights_.cwiseProduct(factors));
}

bool operator==(const GridMeasure& a, const GridMeasure& b) {
  return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
         a.points_ == b.points_ && a.weights_ == b.weights_;
}

bool same_measure(const GridMeasure& a, const GridMeasure& b) { return &a == &b || a == b; }

bool same_measure(const MeasurePtr& a, const MeasurePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(MeasurePtr measure, Eigen::VectorXd values)
    : measure_(std::move(measure)), values_(std::move(values)) {
  if (!measure_) throw ShapeError("GridFunction: null measure");
  if (static_cast<std::size_t>(values_.size()) != measure_->size())
    throw ShapeError("GridFunction: " + std::to_string(values_.size()) + " values for " +
                     std::to_string(measure_->size()) + " points");
  if (!values_.allFinite()) throw DomainError("GridFunction: non-finite value");
}

GridFunction GridFunction::zero(MeasurePtr measure) {
  const auto n = static_cast<Eigen::Index>(measure->size());
  return GridFunction(std::move(measure), Eigen::VectorXd::Zero(n));
}

GridFunction GridFunction::constant(MeasurePtr measure, double c) {
  const auto n = static_cast<Eigen::Index>(measure->size());
  return GridFunction(std::move(measure), Eigen::VectorXd::Constant(n, c));
}

GridFunction GridFunction::tabulate(MeasurePtr measure, const std::function<double(double)>& fn) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(measure->size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = fn(measure->points()(i, 0));
  return GridFunction(std::move(measure), std::move(v));
}

GridFunction GridFunction::tabulate2(MeasurePtr measure,
                                     const std::function<double(double, double)>& fn) {
  if (measure->dim() != 2) throw ShapeError("tabulate2: measure is not 2-D");
  Eigen::VectorXd v(static_cast<Eigen::Index>(measure->size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = fn(measure->points()(i, 0), measure->points()(i, 1));
  return GridFunction(std::move(measure), std::move(v));
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_measure(*this, other, "GridFunction +");
  values_ += other.values_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_measure(*this, other, "GridFunction -");
  values_ -= other.values_;
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  values_ *= s;
  return *this;
}

void require_same_measure(const GridFunction& f, const GridFunction& g, const char* context) {
  if (!same_measure(f.measure(), g.measure()))
    throw ShapeError(std::string(context) + ": functions live on different measures");
}

double inner(const GridFunction& f, const GridFunction& g) {
  require_same_measure(f, g, "inner");
  return (f.measure()->weights().array() * f.values().array() * g.values().array()).sum();
}

double inner(const GridFunction& f, const GridFunction& g, const GridMeasure& mu) {
  if (f.size() != mu.size() || g.size() != mu.size())
    throw ShapeError("inner: function lengths " + std::to_string(f.size()) + ", " +
                     std::to_string(g.size()) + " do not match measure size " +
                     std::to_string(mu.size()));
  return (mu.weights().array() * f.values().array() * g.values().array()).sum();
}

double norm(const GridFunction& f) {
  return std::sqrt((f.measure()->weights().array() * f.values().array().square()).sum());
}

// ---------------------------------------------------------------------------

OrthonormalBasis::OrthonormalBasis(MeasurePtr measure)
    : measure_(std::move(measure)),
      columns_(static_cast<Eigen::Index>(measure_->size()), 0) {}

OrthonormalBasis::OrthonormalBasis(MeasurePtr measure, const std::vector<GridFunction>& elements,
                                   double tol)
    : measure_(std::move(measure)),
      columns_(static_cast<Eigen::Index>(measure_->size()),
               static_cast<Eigen::Index>(elements.size())) {
  for (std::size_t j = 0; j < elements.size(); ++j) {
    if (!same_measure(elements[j].measure(), measure_))
      throw ShapeError("OrthonormalBasis: element " + std::to_string(j) + " lives on another measure");
    columns_.col(static_cast<Eigen::Index>(j)) = elements[j].values();
  }
  check(tol);
}

OrthonormalBasis::OrthonormalBasis(MeasurePtr measure, Eigen::MatrixXd columns, double tol)
    : measure_(std::move(measure)), columns_(std::move(columns)) {
  if (static_cast<std::size_t>(columns_.rows()) != measure_->size())
    throw ShapeError("OrthonormalBasis: column length does not match measure");
  check(tol);
}

void OrthonormalBasis::check(double tol) const {
  if (columns_.cols() == 0) return;
  const Eigen::MatrixXd gram = columns_.transpose() * measure_->weights().asDiagonal() * columns_;
  const Eigen::MatrixXd err = gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  const double worst = err.cwiseAbs().maxCoeff();
  if (!(worst <= tol))
    throw DomainError("OrthonormalBasis: Gram matrix deviates from identity by " +
                      std::to_string(worst));
}

GridFunction OrthonormalBasis::element(std::size_t j) const {
  if (j >= size()) throw ShapeError("OrthonormalBasis: element index out of range");
  return GridFunction(measure_, columns_.col(static_cast<Eigen::Index>(j)));
}

double OrthonormalBasis::sup_norm() const {
  return columns_.size() == 0 ? 0.0 : columns_.cwiseAbs().maxCoeff();
}

GramSchmidtResult gram_schmidt(const std::vector<GridFunction>& fs, const MeasurePtr& mu,
                               double tol) {
  if (!(tol > 0.0)) throw DomainError("gram_schmidt: tol must be positive");
  const auto n = static_cast<Eigen::Index>(mu->size());
  const Eigen::VectorXd& w = mu->weights();
  std::vector<Eigen::VectorXd> kept;
  std::vector<std::size_t> dropped;
  auto w_inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (w.array() * a.array() * b.array()).sum();
  };
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!same_measure(fs[i].measure(), mu))
      throw ShapeError("gram_schmidt: input " + std::to_string(i) + " lives on another measure");
    Eigen::VectorXd v = fs[i].values();
    // Two modified Gram-Schmidt sweeps keep orthogonality at round-off level.
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (const auto& u : kept) v -= w_inner(v, u) * u;
    }
    const double r = std::sqrt(w_inner(v, v));
    if (r < tol) {
      dropped.push_back(i);
      continue;
    }
    kept.push_back(v / r);
  }
  Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = kept[j];
  return {OrthonormalBasis(mu, std::move(cols)), std::move(dropped)};
}

Eigen::VectorXd fourier_coeffs(const GridFunction& f, const OrthonormalBasis& basis) {
  if (!same_measure(f.measure(), basis.measure()))
    throw ShapeError("fourier_coeffs: function and basis live on different measures");
  return basis.matrix().transpose() * (basis.measure()->weights().cwiseProduct(f.values()));
}

GridFunction synthesize(const Eigen::VectorXd& coeffs, const OrthonormalBasis& basis) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size())
    throw ShapeError("synthesize: coefficient count does not match basis size");
  if (basis.empty()) return GridFunction::zero(basis.measure());
  return GridFunction(basis.measure(), basis.matrix() * coeffs);
}

GridFunction project(const GridFunction& f, const OrthonormalBasis& basis) {
  if (!same_measure(f.measure(), basis.measure()))
    throw ShapeError("project: function and basis live on different measures");
  if (basis.empty()) return GridFunction::zero(f.measure());
  return GridFunction(f.measure(), basis.matrix() * fourier_coeffs(f, basis));
}

OrthonormalBasis cosine_basis(const MeasurePtr& grid, std::size_t count) {
  const std::size_t n = grid->size();
  if (count > n) throw DomainError("cosine_basis: more elements than grid points");
  constexpr double pi = 3.14159265358979323846;
  Eigen::MatrixXd cols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    for (std::size_t j = 0; j < count; ++j) {
      cols(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          j == 0 ? 1.0 : std::sqrt(2.0) * std::cos(pi * static_cast<double>(j) * t);
    }
  }
  return OrthonormalBasis(grid, std::move(cols));
}

// ---------------------------------------------------------------------------

namespace {

void write_header(std::ostream& os, int dim, const char* last) {
  os << (dim == 1 ? "x," : "x,y,") << last << '\n';
}

void write_rows(std::ostream& os, const GridMeasure& mu, const Eigen::VectorXd& col) {
  detail::set_full_precision(os);
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    for (int c = 0; c < mu.dim(); ++c) os << mu.points()(i, c) << ',';
    os << col(i) << '\n';
  }
}

}  // namespace

void write_csv(std::ostream& os, const GridMeasure& mu) {
  write_header(os, mu.dim(), "weight");
  write_rows(os, mu, mu.weights());
}

void write_csv(std::ostream& os, const GridFunction& f) {
  write_header(os, f.measure()->dim(), "value");
  write_rows(os, *f.measure(), f.values());
}

GridMeasure read_measure_csv(std::istream& is) {
  auto t = detail::read_csv_table(is);
  const auto cols = t.header.size();
  if (cols != 2 && cols != 3) throw ShapeError("measure csv: expected x[,y],weight columns");
  if (t.header.back() != "weight") throw ShapeError("measure csv: last column must be 'weight'");
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto d = static_cast<Eigen::Index>(cols - 1);
  Eigen::MatrixXd pts(n, d);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < d; ++c) pts(i, c) = row[static_cast<std::size_t>(c)];
    w(i) = row.back();
  }
  return GridMeasure(std::move(pts), std::move(w));
}

GridFunction read_function_csv(std::istream& is, const MeasurePtr& mu) {
  auto t = detail::read_csv_table(is);
  if (t.header.size() != static_cast<std::size_t>(mu->dim()) + 1 || t.header.back() != "value")
    throw ShapeError("function csv: expected coordinate columns followed by 'value'");
  if (t.rows.size() != mu->size())
    throw ShapeError("function csv: row count does not match measure size");
  Eigen::VectorXd v(static_cast<Eigen::Index>(mu->size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (int c = 0; c < mu->dim(); ++c) {
      if (t.rows[i][static_cast<std::size_t>(c)] != mu->point(i, c))
        throw ShapeError("function csv: coordinates of row " + std::to_string(i) +
                         " do not match the measure");
    }
    v(static_cast<Eigen::Index>(i)) = t.rows[i].back();
  }
  return GridFunction(mu, std::move(v));
}

}  // namespace locid
