#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "slnlap/asymptotic.hpp"
#include "slnlap/errors.hpp"
#include "slnlap/inversion.hpp"
#include "slnlap/minimiser.hpp"
#include "slnlap/model.hpp"
#include "slnlap/oracle.hpp"
#include "slnlap/qp.hpp"
#include "slnlap/quasirandom.hpp"
#include "slnlap/special.hpp"
#include "slnlap/transform.hpp"

namespace py = pybind11;
using namespace slnlap;

PYBIND11_MODULE(_slnlap, m) {
  m.doc() = "Saddlepoint approximation of the Laplace transform of a sum of "
            "dependent lognormals";

  py::register_exception<Error>(m, "SlnlapError", PyExc_RuntimeError);

  py::class_<LognormalModel>(m, "LognormalModel")
      .def_static(
          "from_parts",
          [](const Vector& mu, const Matrix& sigma, const std::string& name) {
            return LognormalModel::from_parts(mu, sigma, name);
          },
          py::arg("mu"), py::arg("sigma"), py::arg("name") = std::string())
      .def_readonly("dim", &LognormalModel::dim)
      .def_readonly("mu", &LognormalModel::mu)
      .def_readonly("sigma", &LognormalModel::sigma)
      .def_readonly("precision", &LognormalModel::precision)
      .def_readonly("chol", &LognormalModel::chol)
      .def_readonly("row_sums", &LognormalModel::row_sums)
      .def_readonly("name", &LognormalModel::name);

  m.def("load_model", &load_model, py::arg("text"));
  m.def("load_model_file", &load_model_file, py::arg("path"));

  m.def("lambert_w0", &lambert_w0, py::arg("z"));
  m.def("inv_norm_cdf", &inv_norm_cdf, py::arg("p"));
  m.def("norm_cdf", &norm_cdf, py::arg("z"));

  py::class_<AsymptoticExpansion>(m, "AsymptoticExpansion")
      .def_readonly("beta", &AsymptoticExpansion::beta)
      .def_readonly("c", &AsymptoticExpansion::c)
      .def_readonly("plus_set", &AsymptoticExpansion::plus_set)
      .def_readonly("minus_set", &AsymptoticExpansion::minus_set)
      .def_readonly("minus1_set", &AsymptoticExpansion::minus1_set)
      .def_readonly("star1_set", &AsymptoticExpansion::star1_set)
      .def_readonly("k_index", &AsymptoticExpansion::k_index)
      .def_readonly("C", &AsymptoticExpansion::C);

  m.def("expand", &expand, py::arg("model"));
  m.def("all_positive_expansion", &all_positive_expansion, py::arg("model"));
  m.def("schur_constants", &schur_constants, py::arg("model"), py::arg("star1"));
  m.def("evaluate_expansion", &evaluate, py::arg("expansion"),
        py::arg("model"), py::arg("theta"));

  py::enum_<MinimiseMethod>(m, "MinimiseMethod")
      .value("newton", MinimiseMethod::newton)
      .value("fixed_point", MinimiseMethod::fixed_point)
      .value("hybrid", MinimiseMethod::hybrid);

  py::class_<MinimiserResult>(m, "MinimiserResult")
      .def_readonly("x_star", &MinimiserResult::x_star)
      .def_readonly("lambda_diag", &MinimiserResult::lambda_diag)
      .def_readonly("residual_inf", &MinimiserResult::residual_inf)
      .def_readonly("iterations", &MinimiserResult::iterations)
      .def_readonly("method", &MinimiserResult::method);

  m.def("grad_h", &grad_h, py::arg("model"), py::arg("theta"), py::arg("x"));
  m.def("hessian_h", &hessian_h, py::arg("model"), py::arg("theta"),
        py::arg("x"));
  m.def(
      "minimise_h",
      [](const LognormalModel& model, double theta,
         std::optional<Vector> seed) {
        return minimise_h(model, theta, std::move(seed));
      },
      py::arg("model"), py::arg("theta"), py::arg("seed") = py::none());
  m.def("fixed_point_step", &fixed_point_step, py::arg("model"),
        py::arg("theta"), py::arg("x"));

  m.def("sobol_points", &sobol_points, py::arg("dim"), py::arg("count"));
  m.def("gaussian_qmc_points", &gaussian_qmc_points, py::arg("model"),
        py::arg("count"));

  py::enum_<LaplaceMethod>(m, "LaplaceMethod")
      .value("tilde", LaplaceMethod::tilde)
      .value("cmc", LaplaceMethod::cmc)
      .value("is_", LaplaceMethod::is)
      .value("qmc", LaplaceMethod::qmc);

  py::class_<EstimateWithError>(m, "EstimateWithError")
      .def_readonly("value", &EstimateWithError::value)
      .def_readonly("log_value", &EstimateWithError::log_value)
      .def_readonly("std_error", &EstimateWithError::std_error)
      .def_readonly("reps", &EstimateWithError::reps)
      .def_readonly("method", &EstimateWithError::method)
      .def_readonly("theta", &EstimateWithError::theta)
      .def_readonly("seed", &EstimateWithError::seed);

  m.def("laplace_tilde", &laplace_tilde, py::arg("model"), py::arg("theta"));
  m.def("log_laplace_tilde", &log_laplace_tilde, py::arg("model"),
        py::arg("theta"));
  m.def("correction_integrand_v", &correction_integrand_v, py::arg("model"),
        py::arg("x_star"), py::arg("u"));
  m.def("estimate_I_is", &estimate_I_is, py::arg("model"), py::arg("theta"),
        py::arg("reps"), py::arg("seed") = 42);
  m.def("estimate_I_qmc", &estimate_I_qmc, py::arg("model"), py::arg("theta"),
        py::arg("reps"));
  m.def("laplace_cmc", &laplace_cmc, py::arg("model"), py::arg("theta"),
        py::arg("reps"), py::arg("seed") = 42);
  m.def(
      "laplace",
      [](const LognormalModel& model, double theta, const std::string& method,
         std::int64_t reps, std::uint64_t seed) {
        return laplace(model, theta, laplace_method_from_string(method), reps,
                       seed);
      },
      py::arg("model"), py::arg("theta"), py::arg("method"),
      py::arg("reps") = 10000, py::arg("seed") = 42);

  py::class_<StehfestRule>(m, "StehfestRule")
      .def_readonly("m", &StehfestRule::m)
      .def_readonly("weights", &StehfestRule::weights);

  m.def("stehfest_weights", &stehfest_weights, py::arg("m"));
  m.def("invert", &invert, py::arg("transform"), py::arg("x"), py::arg("rule"));
  m.def(
      "density",
      [](const LognormalModel& model, double x, const std::string& method,
         int gs_terms, std::int64_t reps, std::uint64_t seed) {
        return density(model, x, density_method_from_string(method), gs_terms,
                       reps, seed);
      },
      py::arg("model"), py::arg("x"), py::arg("method"),
      py::arg("gs_terms") = 14, py::arg("reps") = 10000, py::arg("seed") = 42);
  m.def("density_cond_mc", &density_cond_mc, py::arg("model"), py::arg("x"),
        py::arg("reps"), py::arg("seed") = 42);

  m.def(
      "laplace_quadrature",
      [](const LognormalModel& model, double theta) {
        return laplace_quadrature(model, theta);
      },
      py::arg("model"), py::arg("theta"));
  m.def(
      "density_convolution",
      [](const LognormalModel& model, double x) {
        return density_convolution(model, x);
      },
      py::arg("model"), py::arg("x"));

  py::class_<QpSolution>(m, "QpSolution")
      .def_readonly("w", &QpSolution::w)
      .def_readonly("active", &QpSolution::active)
      .def_readonly("residuals", &QpSolution::residuals)
      .def_readonly("iterations", &QpSolution::iterations);

  m.def(
      "solve_qp",
      [](const Matrix& D, const std::vector<std::pair<int, double>>& fixed,
         const std::vector<std::pair<int, double>>& upper,
         const IndexSet& stationary) {
        return solve_qp(QpProblem{D, fixed, upper, stationary});
      },
      py::arg("D"), py::arg("fixed") = std::vector<std::pair<int, double>>{},
      py::arg("upper") = std::vector<std::pair<int, double>>{},
      py::arg("stationary") = IndexSet{});
  m.def("min_variance_portfolio", &min_variance_portfolio, py::arg("model"));
}
