#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "nlpme/run_config.hpp"
#include "nlpme/verification_harness.hpp"

namespace py = pybind11;
using namespace nlpme;

PYBIND11_MODULE(nlpme, m) {
  m.doc() = "monotone finite-difference schemes for nonlocal degenerate "
            "diffusion equations";

  // ---- measures -----------------------------------------------------------
  py::class_<LevyMeasureSpec>(m, "LevyMeasureSpec")
      .def_readonly("dim", &LevyMeasureSpec::dim)
      .def_readonly("alpha", &LevyMeasureSpec::alpha)
      .def("density", &LevyMeasureSpec::density)
      .def("is_zero", &LevyMeasureSpec::is_zero);
  m.def("fractional_measure", &fractional_measure, py::arg("alpha"),
        py::arg("dim"));
  m.def("radial_measure", &radial_measure, py::arg("density"), py::arg("dim"));
  m.def("zero_measure", &zero_measure, py::arg("dim"));
  m.def("fractional_normalization", &fractional_normalization);
  m.def("tail_mass", &tail_mass, py::arg("spec"), py::arg("r"));
  m.def("small_ball_second_moment", &small_ball_second_moment, py::arg("spec"),
        py::arg("r"));
  m.def("cell_mass", &cell_mass, py::arg("spec"), py::arg("center"),
        py::arg("half_width"), py::arg("cutoff"));

  // ---- grid and fields ----------------------------------------------------
  py::class_<UniformGrid>(m, "UniformGrid")
      .def(py::init<int, double, double>(), py::arg("dim"), py::arg("h"),
           py::arg("half_extent"))
      .def_readonly("dim", &UniformGrid::dim)
      .def_readonly("h", &UniformGrid::h)
      .def_readonly("n", &UniformGrid::n)
      .def("size", &UniformGrid::size)
      .def("half_extent", &UniformGrid::half_extent)
      .def("cell_volume", &UniformGrid::cell_volume)
      .def("center", &UniformGrid::center)
      .def("unflatten", &UniformGrid::unflatten);

  py::class_<Field>(m, "Field")
      .def(py::init<const UniformGrid&>(), py::arg("grid"))
      .def_readonly("grid", &Field::grid)
      .def_property(
          "values", [](const Field& f) { return f.values; },
          [](Field& f, const std::vector<double>& v) {
            if (std::int64_t(v.size()) != f.grid.size())
              throw std::invalid_argument("values: size mismatch");
            f.values = v;
          })
      .def("at", [](const Field& f, const MultiIndex& i) { return f.at(i); })
      .def("set_at", [](Field& f, const MultiIndex& i, double v) {
        f.at(i) = v;
      })
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; });
  m.def("cell_average", &cell_average, py::arg("func"), py::arg("grid"));
  m.def("sample", &sample, py::arg("func"), py::arg("grid"));
  m.def("l1_norm", py::overload_cast<const Field&>(&l1_norm));
  m.def("linf_norm", &linf_norm);
  m.def("mass", &mass);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def_static("uniform", &TimeGrid::uniform, py::arg("T"),
                  py::arg("steps"))
      .def_readonly("knots", &TimeGrid::knots)
      .def("steps", &TimeGrid::steps);

  // ---- nonlinearities -----------------------------------------------------
  py::class_<Nonlinearity>(m, "Nonlinearity")
      .def("__call__", &Nonlinearity::operator());
  m.def("identity_nonlinearity", &identity_nonlinearity);
  m.def("power_nonlinearity", &power_nonlinearity, py::arg("m"));
  m.def("stefan_nonlinearity", &stefan_nonlinearity, py::arg("a"),
        py::arg("b"));
  m.def("custom_nonlinearity", &custom_nonlinearity, py::arg("f"),
        py::arg("lipschitz") = std::function<double(double)>());
  m.def("lipschitz_bound", &lipschitz_bound, py::arg("phi"), py::arg("M"));
  py::class_<RegularizedNonlinearity>(m, "RegularizedNonlinearity")
      .def("__call__", &RegularizedNonlinearity::operator())
      .def("lipschitz_estimate", &RegularizedNonlinearity::lipschitz_estimate);
  m.def("regularize", &regularize, py::arg("phi"), py::arg("delta"));

  // ---- discrete operators -------------------------------------------------
  py::class_<DiscreteOperator>(m, "DiscreteOperator")
      .def("dim", &DiscreteOperator::dim)
      .def("h", &DiscreteOperator::h)
      .def("total_mass", &DiscreteOperator::total_mass)
      .def("tail_mass", &DiscreteOperator::tail_mass)
      .def("levy_functional", &DiscreteOperator::levy_functional)
      .def("scaled", &DiscreteOperator::scaled)
      .def("weight_at", &DiscreteOperator::weight_at)
      .def("entries",
           [](const DiscreteOperator& op) {
             std::vector<std::pair<MultiIndex, double>> out;
             for (const auto& e : op.entries())
               out.emplace_back(e.offset, e.weight);
             return out;
           })
      .def("dump", [](const DiscreteOperator& op) {
        std::ostringstream ss;
        dump_operator(ss, op);
        return ss.str();
      });
  m.def("zero_operator", &zero_operator);
  m.def("vanishing_viscosity_operator", &vanishing_viscosity_operator,
        py::arg("spec"), py::arg("r"), py::arg("h"), py::arg("dim"));
  m.def("midpoint_operator", &midpoint_operator, py::arg("spec"), py::arg("r"),
        py::arg("h"), py::arg("dim"), py::arg("R_tail"));
  m.def("multilinear_operator", &multilinear_operator, py::arg("spec"),
        py::arg("r"), py::arg("h"), py::arg("dim"), py::arg("R_tail"));
  m.def("lagrange_operator", &lagrange_operator, py::arg("spec"),
        py::arg("order"), py::arg("r"), py::arg("h"), py::arg("dim"),
        py::arg("R_tail"));
  m.def("discrete_fractional_laplacian", &discrete_fractional_laplacian,
        py::arg("alpha"), py::arg("h"), py::arg("dim"), py::arg("tol"),
        py::arg("R_tail"));
  m.def("local_laplacian_operator", &local_laplacian_operator, py::arg("h"),
        py::arg("dim"));
  m.def("sigma_operator", &sigma_operator, py::arg("sigma_columns"),
        py::arg("h"), py::arg("dim"), py::arg("eta"));
  m.def("add_operators",
        [](const DiscreteOperator& a, const DiscreteOperator& b) {
          return add(a, b);
        });
  m.def("apply", &apply, py::arg("op"), py::arg("field"));
  m.def("fractional_weight_1d", &fractional_weight_1d);

  // ---- elliptic solver ----------------------------------------------------
  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("residual_history", &SolveReport::residual_history)
      .def_readonly("contraction_estimate", &SolveReport::contraction_estimate)
      .def_readonly("delta_used", &SolveReport::delta_used);
  m.def(
      "solve_implicit",
      [](const DiscreteOperator& op, const Nonlinearity& phi, const Field& rho,
         double tol) {
        return solve_implicit(op, phi, rho, tol,
                              default_delta_schedule(op.h()));
      },
      py::arg("op"), py::arg("phi"), py::arg("rho"), py::arg("tol") = 1e-10);

  // ---- time stepping ------------------------------------------------------
  py::enum_<CflPolicy>(m, "CflPolicy")
      .value("ENFORCE", CflPolicy::kEnforce)
      .value("WARN", CflPolicy::kWarn)
      .value("OFF", CflPolicy::kOff);
  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def(py::init<>())
      .def_readwrite("op1", &SchemeConfig::op1)
      .def_readwrite("phi1", &SchemeConfig::phi1)
      .def_readwrite("op2", &SchemeConfig::op2)
      .def_readwrite("phi2", &SchemeConfig::phi2)
      .def_readwrite("times", &SchemeConfig::times)
      .def_readwrite("source", &SchemeConfig::source)
      .def_readwrite("tol", &SchemeConfig::tol)
      .def_readwrite("cfl", &SchemeConfig::cfl);
  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("fields", &Trajectory::fields)
      .def_readonly("times", &Trajectory::times)
      .def_readonly("mass_ledger", &Trajectory::mass_ledger);
  m.def("cfl_bound", &cfl_bound, py::arg("phi2"), py::arg("nu2_mass"),
        py::arg("M"));
  m.def("run", &run, py::arg("config"), py::arg("u0"));

  // ---- verification harness -----------------------------------------------
  m.def("reference_operator_apply", &reference_operator_apply, py::arg("spec"),
        py::arg("psi"), py::arg("points"));
  m.def("stefan_experiment", &stefan_experiment, py::arg("alpha"),
        py::arg("h"), py::arg("dt"), py::arg("T"), py::arg("box_half"));
  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("hs", &ConvergenceReport::hs)
      .def_readonly("l1_errors", &ConvergenceReport::l1_errors)
      .def_readonly("linf_errors", &ConvergenceReport::linf_errors)
      .def_readonly("l1_rate", &ConvergenceReport::l1_rate)
      .def_readonly("linf_rate", &ConvergenceReport::linf_rate);
  m.def("heat_kernel_check", &heat_kernel_check, py::arg("hs"),
        py::arg("dt_exponent"), py::arg("T"), py::arg("box_half") = 6.0);
  m.def(
      "random_compact_field",
      [](const UniformGrid& g, unsigned long seed, double amplitude,
         double support_half) {
        std::mt19937_64 rng(seed);
        return random_compact_field(g, rng, amplitude, support_half);
      },
      py::arg("grid"), py::arg("seed"), py::arg("amplitude"),
      py::arg("support_half"));
  m.def("observed_order", &observed_order, py::arg("hs"), py::arg("errors"),
        py::arg("n") = 4);

  // ---- run configs --------------------------------------------------------
  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("command", &RunConfig::command)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("tol", &RunConfig::tol)
      .def_readonly("h", &RunConfig::h)
      .def_readonly("T", &RunConfig::T)
      .def_readonly("alpha", &RunConfig::alpha);
  m.def("parse_config", &parse_config, py::arg("path"));
  m.def("execute", &execute, py::arg("config"));
}
