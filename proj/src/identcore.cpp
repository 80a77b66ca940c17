#include "locid/identcore.hpp"

#include <cmath>
#include <string>

#include "locid/error.hpp"

namespace locid {

MomentMap::MomentMap(GridFunction base_point, Eval eval, LinearOperator derivative, Norm domain_norm,
                     double base_tol)
    : base_(std::move(base_point)),
      eval_(std::move(eval)),
      derivative_(std::move(derivative)),
      domain_norm_(std::move(domain_norm)) {
  if (!eval_) throw DomainError("MomentMap: missing eval");
  if (!same_measure(base_.measure(), derivative_.domain()))
    throw ShapeError("MomentMap: base point does not live on the derivative's domain");
  derivative_norm_ = derivative_.op_norm();
  const GridFunction m0 = this->eval(base_);
  const double r = norm(m0);
  if (!(r <= base_tol))
    throw DomainError("MomentMap: ||m(alpha0)|| = " + std::to_string(r) + " exceeds " +
                      std::to_string(base_tol));
}

GridFunction MomentMap::eval(const GridFunction& alpha) const {
  GridFunction out = eval_(alpha);
  if (!same_measure(out.measure(), derivative_.codomain()))
    throw ShapeError("MomentMap: eval returned a function off the derivative's codomain");
  return out;
}

double MomentMap::domain_norm(const GridFunction& delta) const {
  return domain_norm_ ? domain_norm_(delta) : norm(delta);
}

void NonlinearityBound::validate() const {
  if (!(L >= 0.0) || !std::isfinite(L)) throw DomainError("NonlinearityBound: L must be >= 0");
  if (!(r >= 1.0)) throw DomainError("NonlinearityBound: r must be >= 1");
  if (!(radius > 0.0)) throw DomainError("NonlinearityBound: radius must be > 0");
}

bool NonlinearityBound::in_neighborhood(const GridFunction& delta, double delta_norm) const {
  if (member) return member(delta);
  return delta_norm < radius;
}

// ---------------------------------------------------------------------------

namespace {

template <class F>
auto with_direction(std::size_t i, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError("direction " + std::to_string(i) + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("direction " + std::to_string(i) + ": " + e.what());
  } catch (const Error& e) {
    throw Error("direction " + std::to_string(i) + ": " + e.what());
  }
}

}  // namespace

GateauxReport gateaux_check(const MomentMap& map, const std::vector<GridFunction>& directions,
                            const std::vector<double>& steps, bool richardson) {
  if (steps.empty()) throw DomainError("gateaux_check: no steps");
  for (std::size_t s = 0; s < steps.size(); ++s) {
    if (!(steps[s] > 0.0)) throw DomainError("gateaux_check: steps must be positive");
    if (s > 0 && !(steps[s] < steps[s - 1]))
      throw DomainError("gateaux_check: steps must be decreasing");
  }
  GateauxReport rep;
  rep.richardson = richardson;
  rep.per_step.assign(steps.size(), 0.0);
  const GridFunction& a0 = map.base_point();
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const GridFunction& h = directions[i];
    const GridFunction lin = map.derivative().apply(h);
    const double denom = std::max(norm(lin), map.zero_tol());
    auto central = [&](double t) {
      return with_direction(i, [&] {
        GridFunction d = map.eval(a0 + t * h) - map.eval(a0 - t * h);
        return d * (0.5 / t);
      });
    };
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const double t = steps[s];
      GridFunction d = central(t);
      if (richardson) d = (4.0 * central(0.5 * t) - d) * (1.0 / 3.0);
      const double err = norm(d - lin) / denom;
      rep.per_step[s] = std::max(rep.per_step[s], err);
    }
  }
  rep.max_rel_error = rep.per_step.back();
  return rep;
}

double estimate_nonlinearity(const MomentMap& map, double r,
                             const std::vector<GridFunction>& deviations) {
  if (!(r >= 1.0)) throw DomainError("estimate_nonlinearity: r must be >= 1");
  const GridFunction m0 = map.eval(map.base_point());
  double best = 0.0;
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    const GridFunction& d = deviations[i];
    const double dn = map.domain_norm(d);
    if (!(dn > 0.0))
      throw DomainError("estimate_nonlinearity: deviation " + std::to_string(i) + " has zero norm");
    const GridFunction m = with_direction(i, [&] { return map.eval_at_deviation(d); });
    const double rem = norm(m - m0 - map.derivative().apply(d));
    best = std::max(best, rem / std::pow(dn, r));
  }
  return best;
}

RankReport rank_condition(const LinearOperator& op, double tol,
                          const std::optional<OrthonormalBasis>& subspace) {
  if (!(tol > 0.0)) throw DomainError("rank_condition: tol must be positive");
  RankReport rep;
  const SvdDecomposition full = op.svd();
  rep.mu1 = full.singular_values.size() ? full.singular_values(0) : 0.0;
  if (subspace) {
    if (!same_measure(subspace->measure(), op.domain()))
      throw ShapeError("rank_condition: subspace lives on another measure");
    if (subspace->empty()) {
      rep.vacuous = true;
      rep.holds = false;
      rep.warning = "empty subspace: the rank condition holds only vacuously";
      return rep;
    }
    // Coefficients in an orthonormal basis are isometric to the subspace.
    auto coeff = share(GridMeasure::unit(subspace->size()));
    LinearOperator restricted(coeff, op.codomain(), op.action() * subspace->matrix());
    const SvdDecomposition s = restricted.svd();
    rep.sigma_min = sigma_min(s, subspace->size());
  } else {
    rep.sigma_min = sigma_min(full, op.domain()->size());
  }
  rep.holds = rep.sigma_min > tol * rep.mu1;
  return rep;
}

bool in_identification_set(const GridFunction& delta, const LinearOperator& op,
                           const NonlinearityBound& bound) {
  const double lhs = norm(op.apply(delta));
  return lhs > bound.L * std::pow(norm(delta), bound.r);
}

bool in_identification_set(const GridFunction& delta, const MomentMap& map,
                           const NonlinearityBound& bound) {
  const double lhs = norm(map.derivative().apply(delta));
  return lhs > bound.L * std::pow(map.domain_norm(delta), bound.r);
}

EllipsoidReport in_ellipsoid(const Eigen::VectorXd& b, const Eigen::VectorXd& mu,
                             const NonlinearityBound& bound) {
  if (!(bound.r > 1.0)) throw DomainError("in_ellipsoid: requires r > 1");
  if (!(bound.L > 0.0)) throw DomainError("in_ellipsoid: requires L > 0");
  if (b.size() != mu.size()) throw ShapeError("in_ellipsoid: b and mu lengths differ");
  const double e = -2.0 / (bound.r - 1.0);
  EllipsoidReport rep;
  rep.rhs = std::pow(bound.L, e);
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    if (b(j) == 0.0) continue;
    if (!(mu(j) > 0.0)) {
      rep.lhs = std::numeric_limits<double>::infinity();
      break;
    }
    rep.lhs += std::pow(mu(j), e) * b(j) * b(j);
  }
  rep.is_center = (b.array() == 0.0).all();
  rep.inside = rep.lhs < rep.rhs;
  return rep;
}

Eigen::VectorXd ellipsoid_draw(const Eigen::VectorXd& mu, const NonlinearityBound& bound, Rng& rng,
                               double fill, double decay) {
  if (!(bound.r > 1.0) || !(bound.L > 0.0)) throw DomainError("ellipsoid_draw: requires r > 1 and L > 0");
  if (!(fill > 0.0 && fill < 1.0)) throw DomainError("ellipsoid_draw: fill must lie in (0, 1)");
  const double p = 1.0 / (bound.r - 1.0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mu.size());
  double w = 1.0;
  for (Eigen::Index j = 0; j < mu.size(); ++j, w *= decay)
    if (mu(j) > 0.0) b(j) = std::pow(mu(j), p) * w * gaussian(rng);
  const EllipsoidReport e = in_ellipsoid(b, mu, bound);
  if (!(e.lhs > 0.0)) throw DomainError("ellipsoid_draw: all singular values vanish");
  return b * std::sqrt(fill * e.rhs / e.lhs);
}

// ---------------------------------------------------------------------------

LocalIdReport verify_local_id(const MomentMap& map, const NonlinearityBound& bound,
                              std::size_t samples, std::uint64_t seed,
                              const LocalIdOptions& options) {
  if (samples == 0) throw DomainError("verify_local_id: samples must be positive");
  bound.validate();
  auto sampler = options.sampler;
  if (!sampler) {
    const SvdDecomposition s = map.derivative().svd();
    const OrthonormalBasis phi = s.right;
    const double scale = options.scale, decay = options.decay;
    sampler = [phi, scale, decay](Rng& rng, std::size_t) {
      Eigen::VectorXd c(static_cast<Eigen::Index>(phi.size()));
      double w = 1.0;
      for (Eigen::Index j = 0; j < c.size(); ++j, w *= decay) c(j) = uniform(rng, -1.0, 1.0) * w;
      const double s = scale * std::pow(10.0, uniform(rng, -3.0, 0.0));
      return synthesize(c * s, phi);
    };
  }
  LocalIdReport rep;
  rep.requested = samples;
  const double tol = map.zero_tol();
  while (rep.accepted < samples && rep.attempts < options.budget) {
    Rng rng = stream_rng(seed, rep.attempts);
    ++rep.attempts;
    const GridFunction delta = sampler(rng, rep.attempts - 1);
    if (!options.ignore_bound) {
      const double dn = map.domain_norm(delta);
      if (!bound.in_neighborhood(delta, dn) || !in_identification_set(delta, map, bound)) continue;
    }
    ++rep.accepted;
    const GridFunction m = map.eval_at_deviation(delta);
    const GridFunction lin = map.derivative().apply(delta);
    const double mn = norm(m);
    rep.min_m_norm = std::min(rep.min_m_norm, mn);
    const bool ok = norm(m - lin) < norm(lin) && mn > tol;
    ok ? ++rep.passes : ++rep.failures;
  }
  if (rep.accepted == 0) {
    rep.empty_neighborhood = true;
    rep.diagnostic = "no draw landed in N'' and N''' within the budget of " +
                     std::to_string(options.budget) + " attempts";
  } else if (rep.accepted < samples) {
    rep.diagnostic = "budget exhausted after " + std::to_string(rep.accepted) + " accepted draws";
  }
  return rep;
}

}  // namespace locid
