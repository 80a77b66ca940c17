// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "locid/error.hpp"
#include "locid/genericity.hpp"
#include "locid/identcore.hpp"
#include "locid/models/ccapm.hpp"
#include "locid/models/gaussian_design.hpp"
#include "locid/models/perron_frobenius.hpp"
#include "locid/models/quantile.hpp"
#include "locid/models/single_index.hpp"
#include "locid/random.hpp"
#include "locid/semiparam.hpp"
#include "oracles.hpp"

using namespace locid;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << "[error: " << e.what() << "] ";
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0 && dt >= time_limit_s) {
    o.ok = false;
    o.detail << "[runtime " << dt << " s exceeds " << time_limit_s << " s] ";
  }
  failures += !o.ok;
  std::printf("%s %2d %s: %s(%.2f s)\n", o.ok ? "PASS" : "FAIL", id, name, o.detail.str().c_str(), dt);
  std::fflush(stdout);
}

const QuantileIvModel& quantile_model() {
  static const QuantileIvModel q{};
  return q;
}

std::vector<GridFunction> quantile_directions(const QuantileIvModel& q, std::uint64_t seed, std::size_t n) {
  std::vector<GridFunction> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = stream_rng(seed, i);
    dirs.push_back(q.random_deviation(rng, 1.0));
  }
  return dirs;
}

}  // namespace

int main() {
  criterion(1, "counterexample reproduction", 1.0, [](Outcome& o) {
    double worst_m = 0.0, worst_dev = 0.0, L = 0.0;
    bool any_in_N = false;
    for (int k = 2; k <= 12; ++k) {
      const CounterexampleResult r = counterexample(k);
      worst_m = std::max(worst_m, r.m_norm);
      worst_dev = std::max(worst_dev, std::abs(r.dev_norm - std::pow(2.0, -k / 4.0)));
      any_in_N |= r.in_N;
      L = r.L;
    }
    o.require(worst_m <= 1e-12, "||m(alpha^k)|| <= 1e-12");
    o.require(worst_dev <= 1e-12, "||alpha^k|| = 2^{-k/4}");
    o.require(!any_in_N, "alpha^k outside N");
    o.require(L >= 1.0, "L >= 1");
    o.detail << "max ||m|| " << worst_m << ", max deviation error " << worst_dev << ", L " << L << " ";
  });

  criterion(2, "quantile ellipsoid soundness", 30.0, [](Outcome& o) {
    const QuantileIvModel& q = quantile_model();
    const MomentMap map = q.moment_map();
    const NonlinearityBound bound = q.bound();
    const SvdDecomposition s = q.derivative().svd();
    const Eigen::VectorXd mu = s.singular_values.head(static_cast<Eigen::Index>(s.right.size()));
    const OrthonormalBasis right = s.right;
    std::size_t pass = 0, outside = 0;
    double min_m = std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng = stream_rng(101, i);
      const Eigen::VectorXd b = ellipsoid_draw(mu, bound, rng, uniform(rng, 0.05, 0.95));
      if (!in_ellipsoid(b, mu, bound).inside) ++outside;
      const GridFunction delta = synthesize(b, right);
      const GridFunction m = map.eval_at_deviation(delta);
      const GridFunction lin = q.derivative().apply(delta);
      min_m = std::min(min_m, norm(m));
      pass += norm(m - lin) < norm(lin) && norm(m) > 1e-10;
    }
    std::vector<GridFunction> devs;
    for (std::uint64_t i = 0; i < 500; ++i) {
      Rng rng = stream_rng(102, i);
      devs.push_back(q.random_deviation(rng, std::pow(10.0, uniform(rng, -3.0, -0.5))));
    }
    const double Lhat = estimate_nonlinearity(map, 2.0, devs);
    o.require(outside == 0, "draws inside the ellipsoid");
    o.require(pass == 200, "all 200 draws identified");
    o.require(Lhat <= 1.05 * bound.L, "L_hat <= 1.05 L1 L2");
    o.detail << pass << "/200 pass, min ||m|| " << min_m << ", L_hat " << Lhat << " vs L1 L2 " << bound.L << " ";
  });

  criterion(3, "svd oracle equivalence", 0.0, [](Outcome& o) {
    double worst_sv = 0.0, worst_norm = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
      Rng rng = stream_rng(103, k);
      auto measure = [&](Eigen::Index n) {
        Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0), w(n);
        for (Eigen::Index i = 0; i < n; ++i) w(i) = uniform(rng, 0.05, 1.0);
        return share(GridMeasure::line(x, w));
      };
      const auto nd = static_cast<Eigen::Index>(2 + k % 11), nc = static_cast<Eigen::Index>(2 + (7 * k) % 11);
      auto d = measure(nd);
      auto c = measure(nc);
      Eigen::MatrixXd K(nc, nd);
      for (Eigen::Index i = 0; i < K.size(); ++i) K.data()[i] = gaussian(rng);
      const LinearOperator T = LinearOperator::from_kernel(K, d, c);
      const SvdDecomposition s = T.svd();
      const Eigen::VectorXd ref = oracle::singular_values(T);
      worst_sv = std::max(worst_sv, (s.singular_values - ref).cwiseAbs().maxCoeff() / ref(0));
      Eigen::VectorXd v(nd);
      for (Eigen::Index i = 0; i < nd; ++i) v(i) = gaussian(rng);
      const GridFunction delta(d, v);
      const Eigen::VectorXd b = fourier_coeffs(delta, s.right);
      const double lhs = std::pow(norm(T.apply(delta)), 2);
      const double rhs = s.singular_values.head(b.size()).cwiseProduct(b).squaredNorm();
      worst_norm = std::max(worst_norm, std::abs(lhs - rhs) / std::max(1.0, lhs));
    }
    o.require(worst_sv <= 1e-9, "singular values within 1e-9 relative");
    o.require(worst_norm <= 1e-8, "||T delta||^2 = sum mu^2 b^2 within 1e-8");
    o.detail << "max relative singular value error " << worst_sv << ", max norm identity error " << worst_norm << " ";
  });

  criterion(4, "random operator injectivity", 60.0, [](Outcome& o) {
    const GeneratorConfig plain = GeneratorConfig::power_law(30, 2.0);
    const InjectivityReport a = mc_injectivity(plain, 1000, 1e-12, 104);
    GeneratorConfig pos = plain;
    pos.positive = true;
    const InjectivityReport b = mc_injectivity(pos, 1000, 1e-12, 105);
    GeneratorConfig dens = pos;
    dens.density = true;
    const InjectivityReport c = mc_injectivity(dens, 1000, 1e-12, 106);
    o.require(a.fraction_below_tol == 0.0 && b.fraction_below_tol == 0.0 && c.fraction_below_tol == 0.0,
              "every draw injective");
    const double mismatch = std::max({a.max_singular_mismatch, b.max_singular_mismatch, c.max_singular_mismatch});
    o.require(mismatch <= 1e-10, "singular values equal sorted |kappa lambda_j|");
    o.require(b.min_kernel >= 0.0 && c.min_kernel >= 0.0, "positive kernels nonnegative");
    o.require(c.max_row_sum_error <= 1e-12, "density rows sum to 1");
    o.detail << "3000 draws, max mismatch " << mismatch << ", min positive kernel "
             << std::min(b.min_kernel, c.min_kernel) << ", max row error " << c.max_row_sum_error << " ";
  });

  criterion(5, "partialling-out inequalities", 0.0, [](Outcome& o) {
    auto grid = share(GridMeasure::line(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.5, 0.5)));
    auto one = share(GridMeasure::unit(1));
    const SplitDerivative hand{{GridFunction(grid, Eigen::Vector2d(1.0, 0.0))},
                               LinearOperator(one, grid, Eigen::MatrixXd::Ones(2, 1))};
    const PiReport hp = partial_out(hand);
    o.require(std::abs(hp.pi(0, 0) - 0.25) <= 1e-9, "hand Pi = 0.25");
    o.require(std::abs(hp.eps1 - 0.35355339059327373) <= 1e-9, "hand eps1 = 0.35355");
    std::size_t violations = split_inequality_check(hand, hp, 10000, 105).violations +
                             partialled_inequality_check(hand, hp, 10000, 105).violations;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const SplitDerivative s = random_split(107, i, 3, 16);
      const PiReport pr = partial_out(s);
      violations += split_inequality_check(s, pr, 10000, 1000 + i).violations;
      violations += partialled_inequality_check(s, pr, 10000, 1000 + i).violations;
    }
    o.require(violations == 0, "zero violations");
    o.detail << "Pi " << hp.pi(0, 0) << ", eps1 " << hp.eps1 << ", eps " << hp.eps << ", " << violations
             << " violations over 101 splits ";
  });

  criterion(6, "tangential cone suite", 0.0, [](Outcome& o) {
    const ConeSuiteReport r = cone_rule_suite(10000, 8, 106);
    o.require(r.total_violations() == 0, "zero violations");
    std::size_t least = r.instances;
    for (auto e : r.exercised) least = std::min(least, e);
    o.require(least > 0, "every rule exercised");
    o.detail << r.instances << " instances, " << r.total_violations() << " violations, least exercised rule "
             << least << " ";
  });

  criterion(7, "single-index necessity", 0.0, [](Outcome& o) {
    std::size_t bad = 0, complete = 0, singular = 0;
    const auto designs = random_designs(24, 107);
    for (const auto& d : designs) {
      const IndexDiagnoseReport r = diagnose_index_identification(SingleIndexModel(d));
      bad += !r.consistent;
      complete += r.complete;
      singular += r.pi_singular;
    }
    const IndexDiagnoseReport s = diagnose_index_identification(SingleIndexModel(GaussianIvDesign::scalar(0.5)));
    const IndexDiagnoseReport t =
        diagnose_index_identification(SingleIndexModel(GaussianIvDesign::two_dim(0.5, 0.4, 0.6)));
    o.require(bad == 0, "no design with completeness and nonsingular Pi");
    o.require(s.lambda_min < 1e-8 * s.pi_scale, "scalar W: Pi singular");
    o.require(t.lambda_min > 1e-4 * t.pi_scale, "two-dimensional W: Pi nonsingular");
    o.detail << designs.size() << " designs (" << complete << " complete, " << singular << " singular Pi), "
             << bad << " violations; scalar ratio " << s.lambda_min / s.pi_scale << ", two-dim ratio "
             << t.lambda_min / t.pi_scale << " ";
  });

  criterion(8, "perron-frobenius eigenpair", 0.0, [](Outcome& o) {
    CcapmDesign d;
    d.n_c = 201;
    d.n_z = 7;
    const CcapmModel m(d);
    const LinearOperator T = m.transfer_operator();
    o.require(T.domain()->size() == 201, "201-point grid");
    const EigenPair e = perron_frobenius(T, 1e-12, 10000);
    const oracle::Leading ref = oracle::leading_eigen(T.action(), T.domain()->weights());
    o.require(e.iterations < 10000, "converges in < 1e4 iterations");
    o.require(e.g.values().minCoeff() > 0.0, "g > 0 at every node");
    o.require(e.residual <= 1e-10, "residual <= 1e-10");
    o.require(ref.second / ref.rho < 1.0, "oracle gap < 1");
    const double pair_err = std::max(std::abs(e.rho - ref.rho) / ref.rho, (e.g.values() - ref.vector).cwiseAbs().maxCoeff());
    o.require(pair_err <= 1e-8, "pair matches oracle within 1e-8");

    auto u = share(GridMeasure::unit(2));
    const double h = 1.0 / std::sqrt(2.0);
    const EigenPair a = perron_frobenius(LinearOperator(u, u, (Eigen::Matrix2d() << 0.6, 0.4, 0.3, 0.7).finished()));
    const EigenPair b = perron_frobenius(LinearOperator(u, u, (Eigen::Matrix2d() << 2, 1, 1, 2).finished()));
    const double hand = std::max({std::abs(a.rho - 1.0), std::abs(a.g[0] - h), std::abs(a.g[1] - h),
                                  std::abs(b.rho - 3.0), std::abs(b.g[0] - h), std::abs(b.g[1] - h)});
    o.require(hand <= 1e-10, "2x2 hand cases");
    o.detail << "delta " << e.delta << ", iterations " << e.iterations << ", residual " << e.residual
             << ", oracle gap " << ref.second / ref.rho << ", pair error " << pair_err << ", hand error " << hand
             << " ";
  });

  criterion(9, "ccapm identification harness", 0.0, [](Outcome& o) {
    const CcapmModel m{};
    const CcapmDesign& d = m.design();
    const CompletenessReport c = completeness_check(m.completeness_operator(m.nc() / 2));
    o.require(c.injective, "completeness operator injective");
    const PiReport pr = partial_out(m.split());
    double scale = 0.0;
    for (const auto& col : m.split().m_beta) scale += inner(col, col);
    o.require(pr.pi.rows() == 2 && pr.lambda_min > 1e-8 * scale, "Pi (2x2) nonsingular");
    const GlobalIdReport g = global_identification_check(
        m, {{d.delta0, d.gamma0, 2.0 * m.g0()}, {d.delta0, d.gamma0 + 0.5, m.g0()}});
    o.require(g.verdicts[0].solves && g.verdicts[0].matches_truth, "accepts (delta0, gamma0, 2 g0)");
    o.require(!g.verdicts[1].solves, "rejects (delta0, gamma0 + 0.5, g0)");
    o.require(g.consistent && !g.vacuous, "global check consistent");
    o.detail << "sigma_min " << c.sigma_min << ", Pi eigenvalues " << pr.pi_eigenvalues(0) << ", "
             << pr.pi_eigenvalues(1) << ", shifted-gamma residual " << g.verdicts[1].residual << " ";
  });

  criterion(10, "derivative fidelity", 0.0, [](Outcome& o) {
    const QuantileIvModel& q = quantile_model();
    const GateauxReport gq = gateaux_check(q.moment_map(), quantile_directions(q, 110, 10), {1e-4}, true);
    const CcapmModel m{};
    const MomentMap map = m.semiparametric().to_moment_map();
    std::vector<GridFunction> dirs;
    const auto n = static_cast<Eigen::Index>(map.base_point().size());
    for (std::uint64_t i = 0; i < 10; ++i) {
      Rng rng = stream_rng(111, i);
      Eigen::VectorXd v(n);
      for (Eigen::Index j = 0; j < n; ++j) v(j) = gaussian(rng);
      const GridFunction h(map.base_point().measure(), v);
      dirs.push_back(h * (1.0 / map.domain_norm(h)));
    }
    const GateauxReport gc = gateaux_check(map, dirs, {1e-4}, true);
    o.require(gq.max_rel_error < 1e-5, "quantile map");
    o.require(gc.max_rel_error < 1e-5, "ccapm map");
    o.detail << "quantile " << gq.max_rel_error << ", ccapm " << gc.max_rel_error << " ";
  });

  return failures == 0 ? 0 : 1;
}
