#pragma once

// Weighted-grid Hilbert spaces. A GridMeasure is a finite set of support
// points with positive quadrature masses; every L2 space in the library is
// L2 of one of these measures.

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace locid {

inline constexpr double kOrthonormalTol = 1e-10;
inline constexpr double kDefaultDropTol = 1e-10;
inline constexpr double kProbabilityTol = 1e-12;

class GridMeasure {
 public:
  // points is n x d with d in {1, 2}; weights has n strictly positive entries.
  GridMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  static GridMeasure line(const Eigen::VectorXd& points, const Eigen::VectorXd& weights);
  // n cell midpoints of [a, b], each with mass 1/n.
  static GridMeasure uniform_probability(std::size_t n, double a = 0.0, double b = 1.0);
  // n equispaced nodes on [a, b] with trapezoid weights.
  static GridMeasure trapezoid(std::size_t n, double a, double b);
  // Points 0, 1, ..., n-1, each with unit mass.
  static GridMeasure unit(std::size_t n);
  // Product measure on the tensor grid of two 1-D measures; x varies slowest.
  static GridMeasure tensor(const GridMeasure& x, const GridMeasure& y);
  // L2(this) (+) R^atoms: appends `atoms` unit-mass points beyond the grid.
  GridMeasure with_atoms(std::size_t atoms) const;
  // Same points, weights multiplied pointwise by factors (must stay > 0).
  GridMeasure reweighted(const Eigen::VectorXd& factors) const;

  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  int dim() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double point(std::size_t i, int axis = 0) const { return points_(static_cast<Eigen::Index>(i), axis); }
  double total_mass() const { return weights_.sum(); }
  bool probability() const { return probability_; }

  friend bool operator==(const GridMeasure& a, const GridMeasure& b);

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  bool probability_ = false;
};

using MeasurePtr = std::shared_ptr<const GridMeasure>;

inline MeasurePtr share(GridMeasure m) { return std::make_shared<const GridMeasure>(std::move(m)); }

// Pointer identity or structural equality.
bool same_measure(const GridMeasure& a, const GridMeasure& b);
bool same_measure(const MeasurePtr& a, const MeasurePtr& b);

class GridFunction {
 public:
  GridFunction(MeasurePtr measure, Eigen::VectorXd values);

  static GridFunction zero(MeasurePtr measure);
  static GridFunction constant(MeasurePtr measure, double c);
  // Tabulate fn at the first coordinate of every point.
  static GridFunction tabulate(MeasurePtr measure, const std::function<double(double)>& fn);
  static GridFunction tabulate2(MeasurePtr measure, const std::function<double(double, double)>& fn);

  const MeasurePtr& measure() const { return measure_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }
  GridFunction operator-() const { return *this * -1.0; }

 private:
  MeasurePtr measure_;
  Eigen::VectorXd values_;
};

// Throws ShapeError naming `context` when f and g live on different measures.
void require_same_measure(const GridFunction& f, const GridFunction& g, const char* context);

// sum_i w_i f_i g_i over the shared measure.
double inner(const GridFunction& f, const GridFunction& g);
// Same sum with an explicitly supplied measure; only sizes are checked.
double inner(const GridFunction& f, const GridFunction& g, const GridMeasure& mu);
double norm(const GridFunction& f);

class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(MeasurePtr measure);
  OrthonormalBasis(MeasurePtr measure, const std::vector<GridFunction>& elements,
                   double tol = kOrthonormalTol);
  // Columns of `columns` are the element values.
  OrthonormalBasis(MeasurePtr measure, Eigen::MatrixXd columns, double tol = kOrthonormalTol);

  std::size_t size() const { return static_cast<std::size_t>(columns_.cols()); }
  bool empty() const { return size() == 0; }
  const MeasurePtr& measure() const { return measure_; }
  const Eigen::MatrixXd& matrix() const { return columns_; }
  GridFunction element(std::size_t j) const;
  // Largest absolute value taken by any element at any node.
  double sup_norm() const;

 private:
  void check(double tol) const;

  MeasurePtr measure_;
  Eigen::MatrixXd columns_;
};

struct GramSchmidtResult {
  OrthonormalBasis basis;
  std::vector<std::size_t> dropped;  // input indices whose residual norm fell below tol
};

GramSchmidtResult gram_schmidt(const std::vector<GridFunction>& fs, const MeasurePtr& mu,
                               double tol = kDefaultDropTol);

GridFunction project(const GridFunction& f, const OrthonormalBasis& basis);
Eigen::VectorXd fourier_coeffs(const GridFunction& f, const OrthonormalBasis& basis);
// sum_j c_j u_j.
GridFunction synthesize(const Eigen::VectorXd& coeffs, const OrthonormalBasis& basis);

// Cosine family 1, sqrt(2) cos(pi j t) on the n-point midpoint grid of [0, 1];
// orthonormal under the uniform probability weights.
OrthonormalBasis cosine_basis(const MeasurePtr& uniform_grid, std::size_t count);

// CSV: one row per point, columns x[,y],weight (measures) or x[,y],value (functions).
void write_csv(std::ostream& os, const GridMeasure& mu);
void write_csv(std::ostream& os, const GridFunction& f);
GridMeasure read_measure_csv(std::istream& is);
GridFunction read_function_csv(std::istream& is, const MeasurePtr& mu);

}  // namespace locid
