#include "locid/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "locid/error.hpp"
#include "locid/genericity.hpp"
#include "locid/identcore.hpp"
#include "locid/models/ccapm.hpp"
#include "locid/models/perron_frobenius.hpp"
#include "locid/models/quantile.hpp"
#include "locid/models/single_index.hpp"
#include "locid/semiparam.hpp"

namespace locid::cli {

namespace {

using nlohmann::json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::size_t count(const json& p, const char* key) { return p.at(key).get<std::size_t>(); }
double real(const json& p, const char* key) { return p.at(key).get<double>(); }

void check(ExperimentResult& r, std::string name, bool ok, std::string detail) {
  r.checks.push_back({std::move(name), ok, std::move(detail)});
}

// Runs one stage; a library error fails the stage instead of aborting the run.
void stage(ExperimentResult& r, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    check(r, name, false, std::string("error: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void run_counterexample(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  CounterexampleOptions opt;
  opt.terms = count(p, "terms");
  const int k_min = p.at("k_min").get<int>(), k_max = p.at("k_max").get<int>();
  stage(r, "counterexample zeros", [&] {
    Table t{"counterexample", {"k", "m_norm", "dev_norm", "expected_dev_norm", "in_N"}, {}};
    double max_m = 0.0, max_dev_err = 0.0, L = 0.0;
    bool any_in_N = false;
    for (int k = k_min; k <= k_max; ++k) {
      const CounterexampleResult res = counterexample(k, opt);
      const double want = std::pow(2.0, -k / 4.0);
      max_m = std::max(max_m, res.m_norm);
      max_dev_err = std::max(max_dev_err, std::abs(res.dev_norm - want));
      any_in_N = any_in_N || res.in_N;
      L = res.L;
      t.rows.push_back({double(k), res.m_norm, res.dev_norm, want, res.in_N ? 1.0 : 0.0});
    }
    r.metrics["L"] = L;
    r.metrics["max_m_norm"] = max_m;
    r.metrics["max_dev_norm_error"] = max_dev_err;
    r.tables.push_back(std::move(t));
    check(r, "m(alpha^k) vanishes", max_m <= 1e-12, "max ||m(alpha^k)|| = " + num(max_m));
    check(r, "deviation norm equals 2^(-k/4)", max_dev_err <= 1e-12, "max error " + num(max_dev_err));
    check(r, "alpha^k outside the identification set", !any_in_N, any_in_N ? "some alpha^k in N" : "none in N");
    check(r, "nonlinearity constant L >= 1", L >= 1.0, "L = " + num(L));
  });
  stage(r, "identification fails on every ball", [&] {
    const MomentMap map = counterexample_map(opt);
    const NonlinearityBound bound = counterexample_bound(opt);
    const auto radii = p.at("radii").get<std::vector<double>>();
    bool all_fail = true;
    json per = json::array();
    for (std::size_t i = 0; i < radii.size(); ++i) {
      LocalIdOptions lo;
      lo.sampler = counterexample_ball_sampler(map.base_point().measure(), radii[i]);
      lo.ignore_bound = true;
      const LocalIdReport rep = verify_local_id(map, bound, count(p, "samples"), c.seed + i, lo);
      per.push_back({{"radius", radii[i]}, {"failures", rep.failures}, {"min_m_norm", rep.min_m_norm}});
      all_fail = all_fail && rep.failures > 0;
    }
    r.metrics["balls"] = per;
    check(r, "identification fails on every ball", all_fail, "radii checked: " + std::to_string(radii.size()));
  });
}

// ---------------------------------------------------------------------------

void run_quantile(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  QuantileDesign d;
  d.tau = real(p, "tau");
  d.nx = count(p, "nx");
  d.nw = count(p, "nw");
  d.ny_half = count(p, "ny_half");
  std::optional<QuantileIvModel> model;
  stage(r, "quantile model", [&] { model.emplace(d); });
  if (!model) return;
  const QuantileIvModel& q = *model;
  const MomentMap map = q.moment_map();
  const NonlinearityBound bound = q.bound();
  r.metrics["L1"] = q.L1();
  r.metrics["L2"] = q.L2();
  r.metrics["L"] = bound.L;
  const double base = norm(q.eval(q.alpha0()));
  r.metrics["base_residual"] = base;
  check(r, "restriction holds at alpha0", base <= 1e-10, "||m(alpha0)|| = " + num(base));

  stage(r, "derivative matches finite differences", [&] {
    std::vector<GridFunction> dirs;
    for (std::size_t i = 0; i < count(p, "directions"); ++i) {
      Rng rng = stream_rng(c.seed, 1000 + i);
      dirs.push_back(q.random_deviation(rng, 1.0));
    }
    const GateauxReport g = gateaux_check(map, dirs, {real(p, "step")}, true);
    r.metrics["gateaux_max_rel_error"] = g.max_rel_error;
    check(r, "derivative matches finite differences", g.max_rel_error < real(p, "gateaux_tol"),
          "max relative error " + num(g.max_rel_error));
  });
  stage(r, "empirical nonlinearity within bound", [&] {
    std::vector<GridFunction> devs;
    for (std::size_t i = 0; i < count(p, "deviations"); ++i) {
      Rng rng = stream_rng(c.seed, 2000 + i);
      const double size = std::pow(10.0, uniform(rng, -3.0, -0.5));
      devs.push_back(q.random_deviation(rng, size));
    }
    const double Lhat = estimate_nonlinearity(map, 2.0, devs);
    r.metrics["L_hat"] = Lhat;
    check(r, "empirical nonlinearity within bound", Lhat <= real(p, "bound_slack") * bound.L,
          "L_hat = " + num(Lhat) + ", L1 L2 = " + num(bound.L));
  });
  stage(r, "ellipsoid points are identified", [&] {
    const SvdDecomposition s = q.derivative().svd();
    const Eigen::VectorXd mu = s.singular_values.head(static_cast<Eigen::Index>(s.right.size()));
    LocalIdOptions lo;
    const OrthonormalBasis right = s.right;
    lo.sampler = [mu, right, bound](Rng& rng, std::size_t) {
      return synthesize(ellipsoid_draw(mu, bound, rng, uniform(rng, 0.05, 0.95)), right);
    };
    const std::size_t n = count(p, "samples");
    const LocalIdReport rep = verify_local_id(map, bound, n, c.seed, lo);
    std::size_t outside = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng = stream_rng(c.seed + 7, i);
      const Eigen::VectorXd b = ellipsoid_draw(mu, bound, rng, uniform(rng, 0.05, 0.95));
      if (!in_identification_set(synthesize(b, right), map, bound)) ++outside;
    }
    r.metrics["ellipsoid"] = {{"accepted", rep.accepted}, {"passes", rep.passes},
                              {"failures", rep.failures}, {"min_m_norm", rep.min_m_norm}};
    check(r, "ellipsoid points are identified",
          rep.accepted == n && rep.passes == n && rep.min_m_norm > 1e-10,
          std::to_string(rep.passes) + "/" + std::to_string(n) + " pass, min ||m|| = " + num(rep.min_m_norm));
    check(r, "ellipsoid lies in the identification set", outside == 0,
          std::to_string(outside) + " sampled points outside");
  });
}

// ---------------------------------------------------------------------------

void run_single_index(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  IndexDiagnoseOptions opt;
  opt.completeness_tol = real(p, "completeness_tol");
  opt.pi_tol = real(p, "pi_tol");
  stage(r, "generated designs", [&] {
    Table t{"designs", {"w_dim", "rho", "complete", "sigma_min_rel", "pi_singular", "lambda_min_rel", "consistent"}, {}};
    std::size_t bad = 0, complete = 0, nonsingular = 0;
    for (const auto& d : random_designs(count(p, "designs"), c.seed)) {
      const IndexDiagnoseReport rep = diagnose_index_identification(SingleIndexModel(d), opt);
      bad += !rep.consistent;
      complete += rep.complete;
      nonsingular += !rep.pi_singular;
      t.rows.push_back({double(d.w_dim), d.v_loading(0), double(rep.complete),
                        rep.mu1 > 0 ? rep.sigma_min / rep.mu1 : 0.0, double(rep.pi_singular),
                        rep.pi_scale > 0 ? rep.lambda_min / rep.pi_scale : 0.0, double(rep.consistent)});
    }
    r.tables.push_back(std::move(t));
    r.metrics["designs"] = {{"count", count(p, "designs")}, {"complete", complete}, {"pi_nonsingular", nonsingular}};
    check(r, "completeness never coexists with nonsingular Pi", bad == 0,
          std::to_string(bad) + " violating designs");
    check(r, "both regimes exercised", complete > 0 && nonsingular > 0,
          std::to_string(complete) + " complete, " + std::to_string(nonsingular) + " with nonsingular Pi");
  });
  stage(r, "scalar W makes Pi singular", [&] {
    const IndexDiagnoseReport rep = diagnose_index_identification(SingleIndexModel(GaussianIvDesign::scalar(0.5)), opt);
    r.metrics["scalar_w"] = {{"lambda_min", rep.lambda_min}, {"scale", rep.pi_scale}, {"complete", rep.complete}};
    check(r, "scalar W makes Pi singular", rep.lambda_min < 1e-8 * rep.pi_scale,
          "lambda_min / scale = " + num(rep.lambda_min / rep.pi_scale));
  });
  stage(r, "two-dimensional W makes Pi nonsingular", [&] {
    const IndexDiagnoseReport rep =
        diagnose_index_identification(SingleIndexModel(GaussianIvDesign::two_dim(0.5, 0.4, 0.6)), opt);
    r.metrics["two_dim_w"] = {{"lambda_min", rep.lambda_min}, {"scale", rep.pi_scale}, {"complete", rep.complete}};
    check(r, "two-dimensional W makes Pi nonsingular", rep.lambda_min > 1e-4 * rep.pi_scale,
          "lambda_min / scale = " + num(rep.lambda_min / rep.pi_scale));
  });
  SemiparamOptions so;
  so.samples = count(p, "samples");
  so.seed = c.seed;
  so.pi_tol = opt.pi_tol;
  stage(r, "partially linear model identified", [&] {
    const SemiparamReport rep = verify_linear_in_g(partially_linear_model(GaussianIvDesign::two_dim(0.5, 0.4, 0.6)), so);
    r.metrics["partially_linear"] = {{"beta_samples", rep.beta_samples}, {"g_only_samples", rep.g_only_samples},
                                     {"eps", rep.eps}, {"min_m_norm", rep.min_m_norm}};
    check(r, "partially linear model identified", rep.passed(),
          std::to_string(rep.beta_failures + rep.g_only_failures) + " failures");
  });
  stage(r, "singular Pi gates the claim", [&] {
    const SemiparamReport rep = verify_linear_in_g(partially_linear_model(GaussianIvDesign::scalar(0.5)), so);
    check(r, "singular Pi gates the claim", rep.precondition_failed && rep.beta_samples == 0, rep.diagnostic);
  });
}

// ---------------------------------------------------------------------------

void run_ccapm(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  CcapmDesign d;
  d.n_c = count(p, "n_c");
  d.n_z = count(p, "n_z");
  d.window = real(p, "window");
  std::optional<CcapmModel> model;
  stage(r, "ccapm model", [&] { model.emplace(d); });
  if (!model) return;
  const CcapmModel& m = *model;
  const double base = norm(m.eval(d.delta0, d.gamma0, m.g0()));
  const double scaled = norm(m.eval(d.delta0, d.gamma0, 2.0 * m.g0()));
  r.metrics["base_residual"] = base;
  check(r, "restriction holds at the truth", base <= 1e-10 && scaled <= 1e-10,
        "||m|| = " + num(base) + ", with 2 g0: " + num(scaled));
  const double gap = m.iterated_expectation_gap();
  r.metrics["iterated_expectation_gap"] = gap;
  check(r, "conditioning down gives the eigen equation", gap <= 1e-9, "max gap " + num(gap));

  const double ctol = real(p, "completeness_tol");
  stage(r, "completeness at median c", [&] {
    const CompletenessReport cr = completeness_check(m.completeness_operator(m.nc() / 2), ctol);
    r.metrics["completeness"] = {{"sigma_min", cr.sigma_min}, {"mu1", cr.mu1}, {"hs_value", cr.hs_value}};
    check(r, "completeness at median c", cr.injective, "sigma_min = " + num(cr.sigma_min));
  });
  const double pi_tol = real(p, "pi_tol");
  stage(r, "Pi nonsingular", [&] {
    const SplitDerivative split = m.split();
    const PiReport pr = partial_out(split);
    double scale = 0.0;
    for (const auto& col : split.m_beta) scale += inner(col, col);
    r.metrics["pi"] = {{"eigenvalues", std::vector<double>(pr.pi_eigenvalues.data(), pr.pi_eigenvalues.data() + pr.pi_eigenvalues.size())},
                       {"eps", pr.eps}, {"range_rank", pr.range_rank}};
    check(r, "Pi nonsingular", pr.lambda_min > pi_tol * scale, "lambda_min = " + num(pr.lambda_min));
  });
  stage(r, "local identification of (beta, g)", [&] {
    SemiparamOptions so;
    so.samples = count(p, "samples");
    so.seed = c.seed;
    so.pi_tol = pi_tol;
    const SemiparametricModel sp = m.semiparametric();
    const SemiparamReport lin = verify_linear_in_g(sp, so);
    NonlinearityBound zero;
    zero.L = 0.0;
    zero.r = 1.0;
    const SemiparamReport nl = verify_nonlinear_in_g(sp, zero, so);
    r.metrics["local_id"] = {{"beta_samples", lin.beta_samples}, {"g_only_samples", lin.g_only_samples},
                             {"full_identification", lin.full_identification}, {"min_m_norm", lin.min_m_norm}};
    check(r, "local identification of (beta, g)", lin.passed() && lin.full_identification && nl.passed(),
          std::to_string(lin.beta_failures + lin.g_only_failures + nl.beta_failures + nl.g_only_failures) +
              " failures");
  });
  stage(r, "global identification up to scale", [&] {
    std::vector<CcapmCandidate> cands = {{d.delta0, d.gamma0, 2.0 * m.g0()},
                                         {d.delta0, d.gamma0 + 0.5, m.g0()},
                                         {d.delta0 * 1.01, d.gamma0, m.g0()}};
    const GlobalIdReport g = global_identification_check(m, cands, 1e-8, 1e-6, ctol);
    json v = json::array();
    for (const auto& x : g.verdicts)
      v.push_back({{"solves", x.solves}, {"residual", x.residual}, {"matches_truth", x.matches_truth},
                   {"ratio_spread", x.ratio_spread}});
    r.metrics["global"] = {{"verdicts", v}, {"consistent", g.consistent}, {"vacuous", g.vacuous}};
    const bool ok = g.consistent && !g.vacuous && g.verdicts[0].solves && g.verdicts[0].matches_truth &&
                    !g.verdicts[1].solves && !g.verdicts[2].solves;
    check(r, "global identification up to scale", ok,
          "scaled g0 residual " + num(g.verdicts[0].residual) + ", shifted gamma residual " +
              num(g.verdicts[1].residual));
  });
  stage(r, "derivative matches finite differences", [&] {
    const MomentMap map = m.semiparametric().to_moment_map();
    std::vector<GridFunction> dirs;
    const auto n = static_cast<Eigen::Index>(map.base_point().size());
    for (std::size_t i = 0; i < count(p, "directions"); ++i) {
      Rng rng = stream_rng(c.seed, 3000 + i);
      Eigen::VectorXd v(n);
      for (Eigen::Index j = 0; j < n; ++j) v(j) = gaussian(rng);
      GridFunction h(map.base_point().measure(), v);
      dirs.push_back(h * (1.0 / map.domain_norm(h)));
    }
    const GateauxReport g = gateaux_check(map, dirs, {real(p, "step")}, true);
    r.metrics["gateaux_max_rel_error"] = g.max_rel_error;
    check(r, "derivative matches finite differences", g.max_rel_error < real(p, "gateaux_tol"),
          "max relative error " + num(g.max_rel_error));
  });
  stage(r, "Perron-Frobenius eigenpair", [&] {
    CcapmDesign big = d;
    big.n_c = count(p, "pf_n_c");
    big.n_z = count(p, "pf_n_z");
    const CcapmModel mb(big);
    const EigenPair e = perron_frobenius(mb, real(p, "pf_tol"), count(p, "pf_max_iter"));
    const double cosine = inner(e.g, mb.g0()) / norm(mb.g0());
    r.metrics["perron_frobenius"] = {{"rho", e.rho}, {"delta", e.delta}, {"residual", e.residual},
                                     {"gap", e.gap}, {"iterations", e.iterations}, {"pairing", e.pairing},
                                     {"cosine_with_g0", cosine}};
    const bool ok = e.residual <= 1e-10 && e.gap < 1.0 && e.g.values().minCoeff() > 0.0 &&
                    std::abs(e.delta - big.delta0) <= 1e-8 && cosine >= 1.0 - 1e-10 && e.pairing > 0.0;
    check(r, "Perron-Frobenius eigenpair", ok,
          "delta = " + num(e.delta) + ", residual " + num(e.residual) + ", gap " + num(e.gap));
  });
}

// ---------------------------------------------------------------------------

void run_genericity(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  GeneratorConfig g = GeneratorConfig::power_law(count(p, "trunc_N"), real(p, "power"));
  g.kappa = real(p, "kappa");
  g.positive = p.at("positive").get<bool>();
  g.density = p.at("density").get<bool>();
  g.dependent_u = p.at("dependent_u").get<bool>();
  stage(r, "random operators are injective", [&] {
    const InjectivityReport rep = mc_injectivity(g, count(p, "draws"), real(p, "tol"), c.seed);
    r.metrics["fraction_below_tol"] = rep.fraction_below_tol;
    r.metrics["max_singular_mismatch"] = rep.max_singular_mismatch;
    r.metrics["min_kernel"] = rep.min_kernel;
    r.metrics["max_row_sum_error"] = rep.max_row_sum_error;
    r.metrics["tail_mass"] = rep.tail_mass;
    Table t{"sigma_min", {"draw", "sigma_min"}, {}};
    for (std::size_t i = 0; i < rep.sigma_min.size(); ++i) t.rows.push_back({double(i), rep.sigma_min[i]});
    r.tables.push_back(std::move(t));
    check(r, "random operators are injective", rep.fraction_below_tol == 0.0,
          "fraction below tol " + num(rep.fraction_below_tol));
    check(r, "singular values equal sorted |kappa lambda_j|", rep.max_singular_mismatch <= real(p, "match_tol"),
          "max mismatch " + num(rep.max_singular_mismatch));
    if (g.positive) check(r, "kernels nonnegative", rep.min_kernel >= 0.0, "min kernel " + num(rep.min_kernel));
    if (g.density)
      check(r, "density rows integrate to 1", rep.max_row_sum_error <= 1e-12,
            "max row error " + num(rep.max_row_sum_error));
  });
}

void run_cone_suite(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  stage(r, "cone inclusions", [&] {
    const ConeSuiteReport rep = cone_rule_suite(count(p, "instances"), p.at("dim").get<int>(), c.seed);
    json rules = json::array();
    bool exercised = true;
    for (std::size_t i = 0; i < ConeSuiteReport::kRules; ++i) {
      rules.push_back({{"rule", ConeSuiteReport::rule_names[i]}, {"exercised", rep.exercised[i]},
                       {"violations", rep.violations[i]}});
      exercised = exercised && rep.exercised[i] > 0;
    }
    r.metrics["rules"] = rules;
    check(r, "cone inclusions", rep.total_violations() == 0,
          std::to_string(rep.total_violations()) + " violations");
    check(r, "every rule exercised", exercised, "instances " + std::to_string(rep.instances));
  });
}

void run_semiparam_pi(const ExperimentConfig& c, ExperimentResult& r) {
  const json& p = c.params;
  const std::size_t trials = count(p, "trials");
  stage(r, "two-point example", [&] {
    auto grid = share(GridMeasure::line(Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(0.5, 0.5)));
    auto one = share(GridMeasure::unit(1));
    SplitDerivative s{{GridFunction(grid, Eigen::Vector2d(1.0, 0.0))},
                      LinearOperator(one, grid, Eigen::MatrixXd::Ones(2, 1))};
    const PiReport pr = partial_out(s);
    const InequalityCheck a2 = split_inequality_check(s, pr, trials, c.seed);
    r.metrics["two_point"] = {{"pi", pr.pi(0, 0)}, {"eps1", pr.eps1}, {"eps", pr.eps}, {"min_ratio", a2.min_ratio}};
    check(r, "two-point example", std::abs(pr.pi(0, 0) - 0.25) <= 1e-12 &&
                                      std::abs(pr.eps1 - std::sqrt(0.125)) <= 1e-9 && a2.violations == 0,
          "Pi = " + num(pr.pi(0, 0)) + ", eps1 = " + num(pr.eps1));
  });
  stage(r, "random splits", [&] {
    std::size_t v1 = 0, v2 = 0, singular = 0;
    double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
    for (std::size_t i = 0; i < count(p, "splits"); ++i) {
      const SplitDerivative s = random_split(c.seed, i, p.at("max_p").get<int>(), p.at("max_n").get<int>());
      const PiReport pr = partial_out(s);
      singular += !(pr.eps > 0.0);
      const InequalityCheck a1 = partialled_inequality_check(s, pr, trials, c.seed + i);
      const InequalityCheck a2 = split_inequality_check(s, pr, trials, c.seed + i);
      v1 += a1.violations;
      v2 += a2.violations;
      min1 = std::min(min1, a1.min_ratio);
      min2 = std::min(min2, a2.min_ratio);
    }
    r.metrics["random_splits"] = {{"splits", count(p, "splits")}, {"singular_pi", singular},
                                  {"min_ratio_partialled", min1}, {"min_ratio_split", min2}};
    check(r, "partialled inequality", v1 == 0, std::to_string(v1) + " violations");
    check(r, "split derivative inequality", v2 == 0, std::to_string(v2) + " violations");
  });
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  static const std::map<std::string, void (*)(const ExperimentConfig&, ExperimentResult&)> table = {
      {"counterexample", run_counterexample}, {"quantile", run_quantile},
      {"single-index", run_single_index},     {"ccapm", run_ccapm},
      {"genericity", run_genericity},         {"cone-suite", run_cone_suite},
      {"semiparam-pi", run_semiparam_pi}};
  const auto it = table.find(config.experiment);
  if (it == table.end()) throw ConfigError("unknown experiment '" + config.experiment + "'");
  ExperimentResult r;
  it->second(config, r);
  return r;
}

}  // namespace locid::cli
