#include "locid/semiparam.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "locid/error.hpp"
#include "locid/random.hpp"

namespace locid {

void SplitDerivative::validate() const {
  for (std::size_t k = 0; k < m_beta.size(); ++k) {
    if (!same_measure(m_beta[k].measure(), m_g.codomain()))
      throw ShapeError("SplitDerivative: m_beta column " + std::to_string(k) +
                       " is not on the codomain of m_g");
  }
}

GridFunction SplitDerivative::apply_beta(const Eigen::VectorXd& a) const {
  if (static_cast<std::size_t>(a.size()) != p()) throw ShapeError("SplitDerivative: |a| != p");
  GridFunction out = GridFunction::zero(m_g.codomain());
  for (std::size_t k = 0; k < p(); ++k) out += a(static_cast<Eigen::Index>(k)) * m_beta[k];
  return out;
}

GridFunction SplitDerivative::apply(const Eigen::VectorXd& a, const GridFunction& dg) const {
  return apply_beta(a) + m_g.apply(dg);
}

namespace {

Eigen::MatrixXd gram(const std::vector<GridFunction>& cols, const Eigen::VectorXd& w) {
  const auto p = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd G(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k <= j; ++k)
      G(j, k) = G(k, j) =
          (w.array() * cols[std::size_t(j)].values().array() * cols[std::size_t(k)].values().array()).sum();
  return G;
}

}  // namespace

PiReport partial_out(const SplitDerivative& split, double range_tol) {
  if (split.p() == 0) throw DomainError("partial_out: p = 0");
  if (!(range_tol > 0.0)) throw DomainError("partial_out: range_tol must be positive");
  split.validate();
  const MeasurePtr& cod = split.m_g.codomain();
  PiReport rep{.pi = {}, .pi_eigenvalues = {}, .zeta_star = {}, .range_basis = OrthonormalBasis(cod)};
  rep.range_tol = range_tol;

  const SvdDecomposition s = split.m_g.svd();
  const double mu1 = s.singular_values.size() ? s.singular_values(0) : 0.0;
  Eigen::Index keep = 0;
  for (Eigen::Index j = 0; j < s.singular_values.size(); ++j) {
    if (mu1 > 0.0 && s.singular_values(j) > range_tol * mu1) ++keep;
    else rep.tail_singular_mass += s.singular_values(j) * s.singular_values(j);
  }
  rep.range_rank = static_cast<std::size_t>(keep);
  rep.degenerate_m_g = keep == 0;
  rep.range_basis = OrthonormalBasis(cod, s.left.matrix().leftCols(keep), 1e-8);

  std::vector<GridFunction> resid;
  for (const auto& b : split.m_beta) {
    rep.zeta_star.push_back(project(b, rep.range_basis));
    resid.push_back(b - rep.zeta_star.back());
  }
  const Eigen::VectorXd& w = cod->weights();
  rep.pi = gram(resid, w);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rep.pi, Eigen::EigenvaluesOnly);
  rep.pi_eigenvalues = es.eigenvalues();
  // Eigenvalues within round-off of the unpartialled Gram are numerically zero.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max(gram(split.m_beta, w).trace(), std::numeric_limits<double>::min());
  rep.lambda_min = rep.pi_eigenvalues(0) <= floor ? 0.0 : rep.pi_eigenvalues(0);
  rep.eps1 = std::sqrt(rep.lambda_min / 2.0);

  double zbar = 0.0;
  for (const auto& z : rep.zeta_star) zbar += inner(z, z);
  rep.c_star = std::max({1.1 * std::sqrt(zbar), rep.eps1 / std::sqrt(2.0),
                         std::numeric_limits<double>::min()});
  rep.eps = std::min(rep.eps1 / 2.0, rep.eps1 / (2.0 * rep.c_star));
  return rep;
}

namespace {

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gaussian(rng);
  return v;
}

double log_scale(Rng& rng, double lo, double hi) { return std::pow(10.0, uniform(rng, lo, hi)); }

}  // namespace

InequalityCheck split_inequality_check(const SplitDerivative& split, const PiReport& report,
                               std::size_t trials, std::uint64_t seed) {
  InequalityCheck out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  const auto p = static_cast<Eigen::Index>(split.p());
  const auto n = static_cast<Eigen::Index>(split.m_g.domain()->size());
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = stream_rng(seed, t);
    const double kind = uniform(rng, 0.0, 1.0);
    Eigen::VectorXd a = random_vector(rng, p) * log_scale(rng, -3.0, 1.0);
    GridFunction dg(split.m_g.domain(), random_vector(rng, n) * log_scale(rng, -3.0, 1.0));
    if (kind < 0.1) a.setZero();
    else if (kind < 0.2) dg = GridFunction::zero(split.m_g.domain());
    const GridFunction zeta = split.m_g.apply(dg);
    const double denom = a.norm() + norm(zeta);
    if (!(denom > 0.0)) continue;
    const double ratio = norm(split.apply_beta(a) + zeta) / denom;
    ++out.trials;
    out.min_ratio = std::min(out.min_ratio, ratio);
    if (ratio < report.eps - 1e-10) ++out.violations;
  }
  return out;
}

InequalityCheck partialled_inequality_check(const SplitDerivative& split, const PiReport& report,
                               std::size_t trials, std::uint64_t seed) {
  InequalityCheck out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  const auto p = static_cast<Eigen::Index>(split.p());
  const auto r = static_cast<Eigen::Index>(report.range_basis.size());
  const MeasurePtr& cod = split.m_g.codomain();
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = stream_rng(seed, t);
    const double kind = uniform(rng, 0.0, 1.0);
    Eigen::VectorXd a = random_vector(rng, p) * log_scale(rng, -3.0, 1.0);
    GridFunction zeta = r ? synthesize(random_vector(rng, r) * log_scale(rng, -3.0, 1.0), report.range_basis)
                          : GridFunction::zero(cod);
    if (kind < 0.1) {
      a.setZero();
    } else if (kind < 0.2) {
      zeta = GridFunction::zero(cod);
    } else if (kind < 0.6) {
      // Cancel the in-range part of b'a, leaving the partialled residual.
      GridFunction worst = GridFunction::zero(cod);
      for (Eigen::Index k = 0; k < p; ++k) worst -= a(k) * report.zeta_star[std::size_t(k)];
      zeta = worst + zeta * log_scale(rng, -8.0, -1.0);
    }
    const double denom = a.norm() + norm(zeta);
    if (!(denom > 0.0)) continue;
    const double ratio = norm(split.apply_beta(a) + zeta) / denom;
    ++out.trials;
    out.min_ratio = std::min(out.min_ratio, ratio);
    if (ratio < report.eps - 1e-10) ++out.violations;
  }
  return out;
}

SplitDerivative random_split(std::uint64_t seed, std::uint64_t index, int max_p, int max_n) {
  if (max_p < 1 || max_n < 2) throw DomainError("random_split: need max_p >= 1 and max_n >= 2");
  Rng rng = stream_rng(seed, index);
  const int n = 2 + static_cast<int>(std::floor(uniform(rng, 0.0, max_n - 1 - 1e-9)));
  const int m = 2 + static_cast<int>(std::floor(uniform(rng, 0.0, max_n - 1 - 1e-9)));
  const int p = 1 + static_cast<int>(std::floor(uniform(rng, 0.0, max_p - 1e-9)));
  auto weights = [&rng](int k) {
    Eigen::VectorXd w(k);
    for (int i = 0; i < k; ++i) w(i) = uniform(rng, 0.2, 1.0);
    return Eigen::VectorXd(w / w.sum());
  };
  auto dom = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(n, 0.0, 1.0), weights(n)));
  auto cod = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(m, 0.0, 1.0), weights(m)));
  const int rank = static_cast<int>(std::floor(uniform(rng, 0.0, std::min(n, m) + 1 - 1e-9)));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
  for (int k = 0; k < rank; ++k) A += random_vector(rng, m) * random_vector(rng, n).transpose();
  LinearOperator mg(dom, cod, A);
  std::vector<GridFunction> cols;
  for (int k = 0; k < p; ++k) {
    if (k == 0 && uniform(rng, 0.0, 1.0) < 0.2)
      cols.push_back(mg.apply(GridFunction(dom, random_vector(rng, n))));
    else
      cols.emplace_back(cod, random_vector(rng, m));
  }
  return {std::move(cols), std::move(mg)};
}

// ---------------------------------------------------------------------------

MomentMap SemiparametricModel::to_moment_map() const {
  split.validate();
  const auto p = static_cast<Eigen::Index>(beta0.size());
  if (static_cast<std::size_t>(p) != split.p()) throw ShapeError("to_moment_map: |beta0| != p");
  const MeasurePtr gm = g0.measure();
  const auto n = static_cast<Eigen::Index>(gm->size());
  auto sum = share(gm->with_atoms(static_cast<std::size_t>(p)));
  Eigen::VectorXd base(n + p);
  base << g0.values(), beta0;
  Eigen::MatrixXd D(split.m_g.action().rows(), n + p);
  D.leftCols(n) = split.m_g.action();
  for (Eigen::Index k = 0; k < p; ++k) D.col(n + k) = split.m_beta[std::size_t(k)].values();
  auto f = eval;
  auto gnorm = g_norm;
  return MomentMap(
      GridFunction(sum, base),
      [f, gm, n, p](const GridFunction& a) {
        return f(a.values().tail(p), GridFunction(gm, a.values().head(n)));
      },
      LinearOperator(sum, split.m_g.codomain(), D),
      [gm, n, p, gnorm](const GridFunction& d) {
        GridFunction dg(gm, d.values().head(n));
        const double gn = gnorm ? gnorm(dg) : norm(dg);
        return std::sqrt(gn * gn + d.values().tail(p).squaredNorm());
      });
}

bool check_linear_in_g(const SemiparametricModel& model, double tol, std::uint64_t seed) {
  const MeasurePtr& gm = model.g0.measure();
  const auto n = static_cast<Eigen::Index>(gm->size());
  const GridFunction m0 = model.eval(model.beta0, model.g0);
  auto dm = [&](const GridFunction& d) { return model.eval(model.beta0, model.g0 + d) - m0; };
  for (std::size_t t = 0; t < 5; ++t) {
    Rng rng = stream_rng(seed, t);
    const double s = 0.1 * (1.0 + norm(model.g0));
    GridFunction d1(gm, random_vector(rng, n)), d2(gm, random_vector(rng, n));
    d1 *= s / norm(d1);
    d2 *= s / norm(d2);
    const double a = uniform(rng, -2.0, 2.0), b = uniform(rng, -2.0, 2.0);
    const GridFunction lhs = dm(a * d1 + b * d2);
    const GridFunction rhs = a * dm(d1) + b * dm(d2);
    if (norm(lhs - rhs) > tol * (1.0 + norm(rhs))) return false;
  }
  return true;
}

namespace {

struct Harness {
  const SemiparametricModel& model;
  const SemiparamOptions& opt;
  PiReport pi;
  OrthonormalBasis dirs;
  double tol = 0.0;
  double scale = 0.0;  // trace of the unpartialled Gram of m'_beta
};

Harness make_harness(const SemiparametricModel& model, const SemiparamOptions& opt) {
  PiReport pi = partial_out(model.split, opt.range_tol);
  OrthonormalBasis dirs =
      model.g_directions ? *model.g_directions : model.split.m_g.svd().right;
  double beta_norm = 0.0;
  for (const auto& c : model.split.m_beta) beta_norm += inner(c, c);
  const double tol = 1e-10 * (1.0 + model.split.m_g.op_norm() + std::sqrt(beta_norm));
  return {model, opt, std::move(pi), std::move(dirs), tol, beta_norm};
}

bool gate(Harness& h, SemiparamReport& rep) {
  rep.lambda_min = h.pi.lambda_min;
  rep.eps = h.pi.eps;
  rep.pi_nonsingular = h.pi.lambda_min > h.opt.pi_tol * std::max(h.scale, 1e-300);
  if (!rep.pi_nonsingular) {
    rep.precondition_failed = true;
    rep.diagnostic = "Pi is singular (lambda_min " + std::to_string(h.pi.lambda_min) +
                     "); nonsingularity precondition failed, no identification claim made";
  }
  return rep.pi_nonsingular;
}

GridFunction draw_dg(Harness& h, Rng& rng) {
  const auto r = static_cast<Eigen::Index>(h.dirs.size());
  GridFunction dg = synthesize(random_vector(rng, r), h.dirs);
  const double gn = h.model.g_deviation_norm(dg);
  if (!(gn > 0.0)) return GridFunction::zero(h.model.g0.measure());
  return dg * (h.opt.g_ball * std::pow(10.0, uniform(rng, -3.0, 0.0)) / gn);
}

Eigen::VectorXd draw_a(Harness& h, Rng& rng) {
  Eigen::VectorXd a = random_vector(rng, static_cast<Eigen::Index>(h.model.beta0.size()));
  return a * (h.opt.B_radius * uniform(rng, 1e-3, 1.0) / a.norm());
}

// acceptor(dg) decides whether a g-deviation lies in the restricted set.
SemiparamReport run(Harness& h, SemiparamReport rep,
                  const std::function<bool(const GridFunction&)>& acceptor) {
  rep.min_m_norm = std::numeric_limits<double>::infinity();
  rep.g_rank_holds = true;
  std::size_t attempts = 0, done = 0;
  const GridFunction zero_g = GridFunction::zero(h.model.g0.measure());
  while (done < h.opt.samples && attempts < h.opt.budget) {
    Rng rng = stream_rng(h.opt.seed, attempts++);
    const double kind = uniform(rng, 0.0, 1.0);
    Eigen::VectorXd a = draw_a(h, rng);
    GridFunction dg = draw_dg(h, rng);
    if (kind < 0.2) dg = zero_g;
    else if (kind < 0.4) a.setZero();
    if ((dg.values().array() != 0.0).any() && !acceptor(dg)) {
      ++rep.rejected;
      continue;
    }
    ++done;
    const GridFunction m = h.model.eval(h.model.beta0 + a, h.model.g0 + dg);
    const double mn = norm(m);
    rep.min_m_norm = std::min(rep.min_m_norm, mn);
    if ((a.array() != 0.0).any()) {
      ++rep.beta_samples;
      if (!(mn > h.tol)) ++rep.beta_failures;
    } else if ((dg.values().array() != 0.0).any()) {
      if (!(norm(h.model.split.m_g.apply(dg)) > h.tol)) {
        rep.g_rank_holds = false;
        continue;
      }
      ++rep.g_only_samples;
      if (!(mn > h.tol)) ++rep.g_only_failures;
    }
  }
  if (done < h.opt.samples)
    rep.diagnostic = "sampling budget exhausted after " + std::to_string(done) +
                     " accepted draws; the restricted g-set is too strict for the sampled profile";
  rep.full_identification = rep.g_rank_holds && rep.passed();
  return rep;
}

}  // namespace

SemiparamReport verify_linear_in_g(const SemiparametricModel& model, const SemiparamOptions& options) {
  SemiparamReport rep;
  rep.linear_in_g = check_linear_in_g(model, options.linearity_tol, options.seed);
  if (!rep.linear_in_g)
    throw DomainError("verify_linear_in_g: m(beta0, g) is not linear in g; use verify_nonlinear_in_g");
  Harness h = make_harness(model, options);
  if (!gate(h, rep)) return rep;
  return run(h, rep, [](const GridFunction&) { return true; });
}

SemiparamReport verify_nonlinear_in_g(const SemiparametricModel& model, const NonlinearityBound& g_bound,
                              const SemiparamOptions& options) {
  g_bound.validate();
  SemiparamReport rep;
  rep.linear_in_g = check_linear_in_g(model, options.linearity_tol, options.seed);
  Harness h = make_harness(model, options);
  if (!gate(h, rep)) return rep;
  const double thresh = g_bound.L / h.pi.eps;
  return run(h, rep, [&](const GridFunction& dg) {
    const double gn = model.g_deviation_norm(dg);
    if (!g_bound.in_neighborhood(dg, gn)) return false;
    return norm(model.split.m_g.apply(dg)) > thresh * std::pow(gn, g_bound.r);
  });
}

}  // namespace locid
