#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "locid/cli/config.hpp"
#include "locid/cli/report.hpp"
#include "locid/error.hpp"
#include "locid/genericity.hpp"
#include "locid/identcore.hpp"
#include "locid/linop.hpp"
#include "locid/models/ccapm.hpp"
#include "locid/models/perron_frobenius.hpp"
#include "locid/models/quantile.hpp"
#include "locid/models/single_index.hpp"
#include "locid/semiparam.hpp"

namespace py = pybind11;
using namespace locid;

namespace {

MeasurePtr measure(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights) {
  return share(GridMeasure(points, weights));
}

py::dict svd_dict(const SvdDecomposition& s) {
  py::dict d;
  d["singular_values"] = s.singular_values;
  d["right"] = s.right.matrix();
  d["left"] = s.left.matrix();
  d["rank"] = s.numerical_rank();
  return d;
}

py::dict pair_dict(const EigenPair& e) {
  py::dict d;
  d["rho"] = e.rho;
  d["delta"] = e.delta;
  d["g"] = e.g.values();
  d["dual"] = e.dual.values();
  d["pairing"] = e.pairing;
  d["residual"] = e.residual;
  d["gap"] = e.gap;
  d["iterations"] = e.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_locid, m) {
  m.doc() = "Local identification toolkit";

  py::register_exception<Error>(m, "LocidError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "svd",
      [](const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& dom_points, const Eigen::VectorXd& dom_weights,
         const Eigen::MatrixXd& cod_points, const Eigen::VectorXd& cod_weights) {
        const LinearOperator op = LinearOperator::from_kernel(kernel, measure(dom_points, dom_weights),
                                                              measure(cod_points, cod_weights));
        py::dict d = svd_dict(op.svd());
        d["hs_norm"] = op.hs_norm();
        return d;
      },
      py::arg("kernel"), py::arg("dom_points"), py::arg("dom_weights"), py::arg("cod_points"),
      py::arg("cod_weights"), "SVD of the kernel operator between two weighted grids");

  m.def(
      "counterexample",
      [](int k, std::size_t terms) {
        CounterexampleOptions o;
        o.terms = terms;
        const CounterexampleResult r = counterexample(k, o);
        py::dict d;
        d["k"] = r.k;
        d["m_norm"] = r.m_norm;
        d["dev_norm"] = r.dev_norm;
        d["expected_dev_norm"] = r.expected_dev_norm;
        d["in_N"] = r.in_N;
        d["L"] = r.L;
        return d;
      },
      py::arg("k"), py::arg("terms") = 64);

  m.def(
      "cone_rule_suite",
      [](std::size_t instances, int dim, std::uint64_t seed) {
        const ConeSuiteReport r = cone_rule_suite(instances, dim, seed);
        py::dict d;
        d["violations"] = std::vector<std::size_t>(r.violations.begin(), r.violations.end());
        d["exercised"] = std::vector<std::size_t>(r.exercised.begin(), r.exercised.end());
        d["total_violations"] = r.total_violations();
        return d;
      },
      py::arg("instances"), py::arg("dim"), py::arg("seed"));

  m.def(
      "mc_injectivity",
      [](std::size_t trunc_N, double power, std::size_t draws, double tol, std::uint64_t seed, bool positive,
         bool density) {
        GeneratorConfig g = GeneratorConfig::power_law(trunc_N, power);
        g.positive = positive || density;
        g.density = density;
        const InjectivityReport r = mc_injectivity(g, draws, tol, seed);
        py::dict d;
        d["sigma_min"] = r.sigma_min;
        d["fraction_below_tol"] = r.fraction_below_tol;
        d["max_singular_mismatch"] = r.max_singular_mismatch;
        d["min_kernel"] = r.min_kernel;
        d["max_row_sum_error"] = r.max_row_sum_error;
        return d;
      },
      py::arg("trunc_N"), py::arg("power"), py::arg("draws"), py::arg("tol"), py::arg("seed"),
      py::arg("positive") = false, py::arg("density") = false);

  m.def(
      "partial_out",
      [](const Eigen::MatrixXd& m_beta, const Eigen::MatrixXd& m_g_action, const Eigen::VectorXd& cod_weights,
         const Eigen::VectorXd& dom_weights, double range_tol) {
        auto cod = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(cod_weights.size(), 0, double(cod_weights.size() - 1)), cod_weights));
        auto dom = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(dom_weights.size(), 0, double(dom_weights.size() - 1)), dom_weights));
        SplitDerivative s{{}, LinearOperator(dom, cod, m_g_action)};
        for (Eigen::Index k = 0; k < m_beta.cols(); ++k) s.m_beta.emplace_back(cod, m_beta.col(k));
        const PiReport r = partial_out(s, range_tol);
        py::dict d;
        d["pi"] = r.pi;
        d["eigenvalues"] = r.pi_eigenvalues;
        d["lambda_min"] = r.lambda_min;
        d["eps1"] = r.eps1;
        d["c_star"] = r.c_star;
        d["eps"] = r.eps;
        d["range_rank"] = r.range_rank;
        return d;
      },
      py::arg("m_beta"), py::arg("m_g_action"), py::arg("cod_weights"), py::arg("dom_weights"),
      py::arg("range_tol") = 1e-12);

  m.def(
      "quantile_model",
      [](double tau, std::size_t nx, std::size_t nw, std::size_t ny_half) {
        QuantileDesign d;
        d.tau = tau;
        d.nx = nx;
        d.nw = nw;
        d.ny_half = ny_half;
        const QuantileIvModel q(d);
        py::dict out;
        out["L1"] = q.L1();
        out["L2"] = q.L2();
        out["base_residual"] = norm(q.eval(q.alpha0()));
        out["alpha0"] = q.alpha0().values();
        out["singular_values"] = q.derivative().svd().singular_values;
        return out;
      },
      py::arg("tau") = 0.5, py::arg("nx") = 101, py::arg("nw") = 101, py::arg("ny_half") = 80);

  m.def(
      "index_diagnose",
      [](double rho, int w_dim, double b1, double b2) {
        const GaussianIvDesign d = w_dim == 1 ? GaussianIvDesign::scalar(rho) : GaussianIvDesign::two_dim(rho, b1, b2);
        const IndexDiagnoseReport r = diagnose_index_identification(SingleIndexModel(d));
        py::dict out;
        out["complete"] = r.complete;
        out["sigma_min"] = r.sigma_min;
        out["pi_singular"] = r.pi_singular;
        out["lambda_min"] = r.lambda_min;
        out["pi_scale"] = r.pi_scale;
        out["consistent"] = r.consistent;
        return out;
      },
      py::arg("rho") = 0.5, py::arg("w_dim") = 1, py::arg("b1") = 0.4, py::arg("b2") = 0.6);

  m.def(
      "perron_frobenius",
      [](const Eigen::MatrixXd& action, const Eigen::VectorXd& weights, double tol, std::size_t max_iter) {
        auto mu = share(GridMeasure::line(Eigen::VectorXd::LinSpaced(weights.size(), 0, double(weights.size() - 1)), weights));
        return pair_dict(perron_frobenius(LinearOperator(mu, mu, action), tol, max_iter));
      },
      py::arg("action"), py::arg("weights"), py::arg("tol") = 1e-12, py::arg("max_iter") = 100000);

  m.def(
      "ccapm_eigenpair",
      [](std::size_t n_c, std::size_t n_z) {
        CcapmDesign d;
        d.n_c = n_c;
        d.n_z = n_z;
        const CcapmModel model(d);
        py::dict out = pair_dict(perron_frobenius(model));
        out["g0"] = model.g0().values();
        out["delta0"] = d.delta0;
        return out;
      },
      py::arg("n_c") = 201, py::arg("n_z") = 7);

  m.def("list_experiments", [] {
    py::list out;
    for (const auto& e : cli::catalog()) {
      py::dict d;
      d["name"] = e.name;
      d["description"] = e.description;
      d["exercises"] = e.exercises;
      out.append(d);
    }
    return out;
  });

  m.def(
      "run_experiment_json",
      [](const std::string& config_text) {
        const cli::RunReport r = cli::run(cli::parse_config_text(config_text));
        return cli::report_json(r).dump();
      },
      py::arg("config_text"), "Run an experiment config (JSON text) and return the JSON report");
}
