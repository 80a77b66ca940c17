#include "locid/linop.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <ostream>
#include <sstream>

#include "csv_util.hpp"
#include "locid/error.hpp"

#include <json.hpp>

namespace locid {

std::size_t SvdDecomposition::numerical_rank() const {
  std::size_t r = 0;
  for (Eigen::Index j = 0; j < singular_values.size(); ++j) {
    if (singular_values(j) > zero_threshold) ++r;
  }
  return r;
}

double sigma_min(const SvdDecomposition& s, std::size_t domain_size) {
  if (s.singular_values.size() == 0) return 0.0;
  if (static_cast<std::size_t>(s.singular_values.size()) < domain_size) return 0.0;
  return s.singular_values(s.singular_values.size() - 1);
}

LinearOperator::LinearOperator(MeasurePtr domain, MeasurePtr codomain, Eigen::MatrixXd action)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), action_(std::move(action)) {
  if (!domain_ || !codomain_) throw ShapeError("LinearOperator: null measure");
  if (static_cast<std::size_t>(action_.rows()) != codomain_->size() ||
      static_cast<std::size_t>(action_.cols()) != domain_->size())
    throw ShapeError("LinearOperator: action is " + std::to_string(action_.rows()) + "x" +
                     std::to_string(action_.cols()) + ", expected " +
                     std::to_string(codomain_->size()) + "x" + std::to_string(domain_->size()));
  if (!action_.allFinite()) throw NumericError("LinearOperator: non-finite entry");
}

LinearOperator LinearOperator::from_kernel(const Eigen::MatrixXd& K, MeasurePtr domain,
                                           MeasurePtr codomain, bool require_nonnegative) {
  if (!K.allFinite()) throw NumericError("from_kernel: non-finite kernel entry");
  if (require_nonnegative && K.size() > 0 && K.minCoeff() < 0.0)
    throw DomainError("from_kernel: kernel has a negative entry");
  if (static_cast<std::size_t>(K.cols()) != domain->size())
    throw ShapeError("from_kernel: kernel columns do not match domain size");
  Eigen::MatrixXd M = K * domain->weights().asDiagonal();
  return LinearOperator(std::move(domain), std::move(codomain), std::move(M));
}

LinearOperator LinearOperator::identity(MeasurePtr space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return LinearOperator(space, space, Eigen::MatrixXd::Identity(n, n));
}

LinearOperator LinearOperator::zero(MeasurePtr domain, MeasurePtr codomain) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(codomain->size()),
                                            static_cast<Eigen::Index>(domain->size()));
  return LinearOperator(std::move(domain), std::move(codomain), std::move(M));
}

Eigen::MatrixXd LinearOperator::kernel() const {
  return action_ * domain_->weights().cwiseInverse().asDiagonal();
}

GridFunction LinearOperator::apply(const GridFunction& f) const {
  if (!same_measure(f.measure(), domain_))
    throw ShapeError("apply: function does not live on the operator's domain");
  return GridFunction(codomain_, action_ * f.values());
}

LinearOperator LinearOperator::adjoint() const {
  Eigen::MatrixXd A = domain_->weights().cwiseInverse().asDiagonal() * action_.transpose() *
                      codomain_->weights().asDiagonal();
  return LinearOperator(codomain_, domain_, std::move(A));
}

LinearOperator LinearOperator::compose(const LinearOperator& other) const {
  if (!same_measure(other.codomain_, domain_))
    throw ShapeError("compose: inner codomain differs from outer domain");
  return LinearOperator(other.domain_, codomain_, action_ * other.action_);
}

LinearOperator LinearOperator::operator+(const LinearOperator& other) const {
  if (!same_measure(domain_, other.domain_) || !same_measure(codomain_, other.codomain_))
    throw ShapeError("operator +: measures differ");
  return LinearOperator(domain_, codomain_, action_ + other.action_);
}

LinearOperator LinearOperator::operator-(const LinearOperator& other) const {
  return *this + other * -1.0;
}

LinearOperator LinearOperator::operator*(double s) const {
  return LinearOperator(domain_, codomain_, action_ * s);
}

SvdDecomposition LinearOperator::svd(double rel_tol) const {
  if (!(rel_tol >= 0.0)) throw DomainError("svd: tolerance must be nonnegative");
  const Eigen::VectorXd sd = domain_->weights().cwiseSqrt();
  const Eigen::VectorXd sc = codomain_->weights().cwiseSqrt();
  // Weighted problem reduces to the Euclidean SVD of W_c^{1/2} M W_d^{-1/2}.
  const Eigen::MatrixXd B = sc.asDiagonal() * action_ * sd.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> dec(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success || !dec.singularValues().allFinite()) {
    std::ostringstream msg;
    msg << "svd: decomposition failed for " << B.rows() << "x" << B.cols()
        << " operator, max |entry| " << (B.size() ? B.cwiseAbs().maxCoeff() : 0.0);
    throw NumericError(msg.str());
  }
  SvdDecomposition out{dec.singularValues(),
                       OrthonormalBasis(domain_, sd.cwiseInverse().asDiagonal() * dec.matrixV(), 1e-8),
                       OrthonormalBasis(codomain_, sc.cwiseInverse().asDiagonal() * dec.matrixU(), 1e-8),
                       0.0};
  const double mu1 = out.singular_values.size() ? out.singular_values(0) : 0.0;
  out.zero_threshold = rel_tol * mu1;
  return out;
}

double LinearOperator::hs_norm() const {
  const Eigen::VectorXd sd = domain_->weights().cwiseSqrt();
  const Eigen::VectorXd sc = codomain_->weights().cwiseSqrt();
  return (sc.asDiagonal() * action_ * sd.cwiseInverse().asDiagonal()).norm();
}

double LinearOperator::op_norm() const {
  auto s = svd();
  return s.singular_values.size() ? s.singular_values(0) : 0.0;
}

// ---------------------------------------------------------------------------

namespace {

void check_joint(const JointDensity& joint) {
  if (!joint.x || !joint.w) throw ShapeError("joint density: null grid");
  if (static_cast<std::size_t>(joint.density.rows()) != joint.x->size() ||
      static_cast<std::size_t>(joint.density.cols()) != joint.w->size())
    throw ShapeError("joint density: table must be nx x nw");
  if (!joint.density.allFinite() || joint.density.minCoeff() < 0.0)
    throw DomainError("joint density: entries must be finite and nonnegative");
}

Eigen::MatrixXd conditional_action(const JointDensity& joint,
                                   const std::optional<Eigen::MatrixXd>& weight) {
  check_joint(joint);
  const Eigen::VectorXd fw = w_marginal(joint);
  for (Eigen::Index j = 0; j < fw.size(); ++j) {
    if (!(fw(j) > 0.0)) {
      std::ostringstream msg;
      msg << "conditional_expectation: degenerate marginal, zero conditional mass at w[" << j
          << "] = (" << joint.w->points()(j, 0);
      if (joint.w->dim() == 2) msg << ", " << joint.w->points()(j, 1);
      msg << ")";
      throw DomainError(msg.str());
    }
  }
  Eigen::MatrixXd M = joint.density.transpose();  // nw x nx
  if (weight) {
    if (weight->rows() != joint.density.rows() || weight->cols() != joint.density.cols())
      throw ShapeError("conditional_expectation: weight table must be nx x nw");
    M = M.cwiseProduct(weight->transpose());
  }
  M = fw.cwiseInverse().asDiagonal() * M * joint.x->weights().asDiagonal();
  return M;
}

}  // namespace

Eigen::VectorXd w_marginal(const JointDensity& joint) {
  check_joint(joint);
  return joint.density.transpose() * joint.x->weights();
}

Eigen::VectorXd x_marginal(const JointDensity& joint) {
  check_joint(joint);
  return joint.density * joint.w->weights();
}

LinearOperator conditional_expectation(const JointDensity& joint,
                                       const std::optional<Eigen::MatrixXd>& weight) {
  return LinearOperator(joint.x, joint.w, conditional_action(joint, weight));
}

LinearOperator conditional_expectation_between_laws(const JointDensity& joint,
                                                    const std::optional<Eigen::MatrixXd>& weight) {
  Eigen::MatrixXd M = conditional_action(joint, weight);
  auto px = share(joint.x->reweighted(x_marginal(joint)));
  auto pw = share(joint.w->reweighted(w_marginal(joint)));
  return LinearOperator(std::move(px), std::move(pw), std::move(M));
}

// ---------------------------------------------------------------------------

void write_operator_csv(std::ostream& os, const LinearOperator& op) {
  const auto& M = op.action();
  for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << "t" << j;
  os << '\n';
  detail::set_full_precision(os);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << M(i, j);
    os << '\n';
  }
}

std::string operator_sidecar_json(const LinearOperator& op, const std::string& domain_name,
                                  const std::string& codomain_name) {
  nlohmann::json j;
  j["entries"] = "action";
  j["domain"] = {{"name", domain_name}, {"size", op.domain()->size()}, {"dim", op.domain()->dim()}};
  j["codomain"] = {
      {"name", codomain_name}, {"size", op.codomain()->size()}, {"dim", op.codomain()->dim()}};
  return j.dump(2);
}

LinearOperator read_operator_csv(std::istream& is, MeasurePtr domain, MeasurePtr codomain) {
  auto t = detail::read_csv_table(is);
  if (t.header.size() != domain->size())
    throw ShapeError("operator csv: column count does not match domain size");
  if (t.rows.size() != codomain->size())
    throw ShapeError("operator csv: row count does not match codomain size");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.header.size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.rows[i][j];
  return LinearOperator(std::move(domain), std::move(codomain), std::move(M));
}

}  // namespace locid
