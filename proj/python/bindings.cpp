#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "thinfilm/analysis.hpp"
#include "thinfilm/commands.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/model.hpp"

namespace py = pybind11;
using namespace thinfilm;

namespace {

ProblemParams make_problem(const std::string& n, const std::string& m, double a0, double a1, double a, int nx) {
  ProblemParams p;
  p.n = Exponent::parse(n);
  p.m = Exponent::parse(m);
  p.a0 = a0;
  p.a1 = a1;
  p.a = a;
  p.nx = nx;
  p.validate();
  return p;
}

Field make_field(std::vector<double> h, double a) {
  const double dx = 2.0 * a / static_cast<double>(h.size());
  return Field(std::move(h), dx, -a);
}

}  // namespace

PYBIND11_MODULE(_thinfilm, mod) {
  mod.doc() = "Thin-film solver core";

  py::register_exception<Error>(mod, "ThinfilmError", PyExc_RuntimeError);

  py::class_<ProblemParams>(mod, "Problem")
      .def(py::init(&make_problem), py::arg("n"), py::arg("m"), py::arg("a0") = 1.0, py::arg("a1") = 1.0,
           py::arg("a") = 1.0, py::arg("nx") = 256,
           "Exponents are strings so that boundary cases like m = n + 2 compare exactly.")
      .def_property_readonly("n", [](const ProblemParams& p) { return p.n.value; })
      .def_property_readonly("m", [](const ProblemParams& p) { return p.m.value; })
      .def_readonly("a0", &ProblemParams::a0)
      .def_readonly("a1", &ProblemParams::a1)
      .def_readonly("a", &ProblemParams::a)
      .def_readonly("nx", &ProblemParams::nx)
      .def_property_readonly("dx", &ProblemParams::dx);

  mod.def("classify_regime", [](const ProblemParams& p) { return std::string(to_string(classify_regime(p))); });
  mod.def("theorem_flags", [](const ProblemParams& p) {
    const auto f = theorem_applicability(p);
    return py::dict(py::arg("existence_ok") = f.existence_ok, py::arg("fsp_ok") = f.fsp_ok,
                    py::arg("blowup_ok") = f.blowup_ok);
  });
  mod.def("growth_rate", &growth_rate, py::arg("xi"), py::arg("hbar"), py::arg("problem"));
  mod.def("band_edge", &band_edge, py::arg("hbar"), py::arg("problem"));
  mod.def("critical_mass", &critical_mass, py::arg("problem"), py::arg("eps_interp") = 0.1);

  mod.def("mobility", &mobility, py::arg("z"), py::arg("n"), py::arg("eps"), py::arg("delta") = 0.0);
  mod.def("pressure_coupling", &pressure_coupling, py::arg("z"), py::arg("n"), py::arg("m"), py::arg("eps"));
  mod.def(
      "energy", [](std::vector<double> h, const ProblemParams& p) { return energy(make_field(std::move(h), p.a), p); },
      py::arg("h"), py::arg("problem"), "Energy of nodal values on the periodic grid of (-a, a).");
  mod.def(
      "entropy",
      [](std::vector<double> h, double a, double n, double alpha, double eps) {
        return entropy_value(make_field(std::move(h), a), make_entropy_spec(n, alpha, eps));
      },
      py::arg("h"), py::arg("a"), py::arg("n"), py::arg("alpha") = 0.0, py::arg("eps") = 0.0);

  mod.def(
      "bihari_bound",
      [](double v0, double c, double gamma, double t) {
        const auto b = bihari_bound(v0, c, gamma);
        return py::make_tuple(b(t), b.blow_time);
      },
      py::arg("v0"), py::arg("c"), py::arg("gamma"), py::arg("t"), "Returns (bound at t, blow-up time).");

  mod.def(
      "parse_config",
      [](const std::string& text) {
        const auto c = parse_config(text);
        return py::dict(py::arg("n") = c.problem.n.value, py::arg("m") = c.problem.m.value,
                        py::arg("a0") = c.problem.a0, py::arg("a1") = c.problem.a1, py::arg("a") = c.problem.a,
                        py::arg("nx") = c.problem.nx, py::arg("eps") = c.solver.eps,
                        py::arg("t_end") = c.solver.t_end, py::arg("output_dir") = c.output_dir,
                        py::arg("seed") = c.seed);
      },
      py::arg("text"));

  mod.def(
      "run_command",
      [](const std::string& name, const std::filesystem::path& config, std::optional<std::filesystem::path> out,
         std::optional<std::uint64_t> seed, bool force) {
        CommandOptions opt{std::move(out), seed, force};
        std::ostringstream log;
        int status = 0;
        {
          py::gil_scoped_release release;
          status = run_command(name, config, opt, log);
        }
        return py::make_tuple(status, log.str());
      },
      py::arg("name"), py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      py::arg("force") = false, "Runs a CLI subcommand; returns (exit status, log text).");
}
