#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msturm/errors.hpp"
#include "msturm/fixtures.hpp"
#include "msturm/focal.hpp"
#include "msturm/forms.hpp"
#include "msturm/geometry.hpp"
#include "msturm/indexform.hpp"
#include "msturm/problem.hpp"
#include "msturm/sturm_solver.hpp"
#include "msturm/tolerances.hpp"

namespace py = pybind11;
using namespace msturm;

namespace {

SolveOptions solve_opts(const Tolerances& t) { return {t.ode_tol, t.grid_size, true}; }

ScanOptions scan_opts(const Tolerances& t) {
  ScanOptions s;
  s.tol_rank = t.tol_rank;
  s.tol_eig = t.tol_eig;
  s.refine_tol = t.refine_tol;
  s.t_guard = t.t_guard;
  return s;
}

py::dict focal_dict(const FocalInstant& f) {
  py::dict d;
  d["t"] = f.t;
  d["multiplicity"] = f.multiplicity;
  d["signature"] = f.signature;
  d["degenerate"] = f.degenerate;
  d["kernel_basis"] = f.kernel_basis;
  d["jperp_basis"] = f.jperp_basis;
  d["sigma_min"] = f.sigma_min;
  return d;
}

template <class E>
void error(py::module_& m, const char* name, py::handle base) {
  py::register_exception<E>(m, name, base);
}

}  // namespace

PYBIND11_MODULE(_msturm, m) {
  m.doc() = "Morse-Sturm index toolkit";

  auto base = py::register_exception<Error>(m, "MsturmError", PyExc_RuntimeError);
  error<PreconditionError>(m, "PreconditionError", base);
  error<DegenerateMetric>(m, "DegenerateMetric", base);
  error<InvalidSubspace>(m, "InvalidSubspace", base);
  error<ParseError>(m, "ParseError", base);
  error<SchemaError>(m, "SchemaError", base);
  error<ValidationFailed>(m, "ValidationFailed", base);
  error<PerturbationBrokeInvariant>(m, "PerturbationBrokeInvariant", base);
  error<NotTimelike>(m, "NotTimelike", base);
  error<MissingSeed>(m, "MissingSeed", base);
  error<IntegrationFailure>(m, "IntegrationFailure", base);
  error<EndpointFocal>(m, "EndpointFocal", base);
  error<DegenerateFocalInstant>(m, "DegenerateFocalInstant", base);
  error<NoAgreement>(m, "NoAgreement", base);
  error<AllTrialsDegenerate>(m, "AllTrialsDegenerate", base);
  error<EmptyKernel>(m, "EmptyKernel", base);
  error<LeftChart>(m, "LeftChart", base);
  error<CurvatureAsymmetry>(m, "CurvatureAsymmetry", base);
  error<UnresolvedRoot>(m, "UnresolvedRoot", base);
  error<NotStabilized>(m, "NotStabilized", base);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("ode_tol", &Tolerances::ode_tol)
      .def_readwrite("grid_size", &Tolerances::grid_size)
      .def_readwrite("tol_rank", &Tolerances::tol_rank)
      .def_readwrite("tol_eig", &Tolerances::tol_eig)
      .def_readwrite("refine_tol", &Tolerances::refine_tol)
      .def_readwrite("t_guard", &Tolerances::t_guard)
      .def_readwrite("witness_samples", &Tolerances::witness_samples)
      .def_readwrite("mesh", &Tolerances::mesh)
      .def_readwrite("mesh_schedule", &Tolerances::mesh_schedule)
      .def("to_json", [](const Tolerances& t) { return to_json(t).dump(); });

  py::class_<Inertia>(m, "Inertia")
      .def_readonly("n_plus", &Inertia::n_plus)
      .def_readonly("n_minus", &Inertia::n_minus)
      .def_readonly("n_zero", &Inertia::n_zero)
      .def_property_readonly("signature", &Inertia::signature)
      .def("__repr__", [](const Inertia& i) {
        return "Inertia(n_plus=" + std::to_string(i.n_plus) + ", n_minus=" + std::to_string(i.n_minus) +
               ", n_zero=" + std::to_string(i.n_zero) + ")";
      });
  m.def("inertia", &inertia, py::arg("form"), py::arg("tol_eig") = kDefaultTolEig);

  py::class_<MorseSturmProblem>(m, "Problem")
      .def_property_readonly("n", &MorseSturmProblem::n)
      .def_property_readonly("g", [](const MorseSturmProblem& p) { return Matrix(p.g.entries()); })
      .def_property_readonly("P", [](const MorseSturmProblem& p) { return Matrix(p.boundary.P.basis()); })
      .def_property_readonly("S", [](const MorseSturmProblem& p) { return p.boundary.S; })
      .def("R", [](const MorseSturmProblem& p, double t) { return p.R(t); }, py::arg("t"))
      .def_property_readonly("has_seed", [](const MorseSturmProblem& p) { return p.y_seed.has_value(); })
      .def("to_json", [](const MorseSturmProblem& p) { return problem_to_json(p).dump(); })
      .def_static("from_json", [](const std::string& text) { return parse_problem(text); }, py::arg("text"))
      .def("save", [](const MorseSturmProblem& p, const std::string& path) { save(p, path); }, py::arg("path"))
      .def("violations",
           [](const MorseSturmProblem& p) {
             std::vector<std::pair<std::string, std::string>> out;
             for (const auto& v : validate(p)) out.emplace_back(v.invariant, v.detail);
             return out;
           })
      .def("boundary_form", [](const MorseSturmProblem& p) { return boundary_form(p); })
      .def("__eq__", [](const MorseSturmProblem& a, const MorseSturmProblem& b) { return a == b; });

  m.def("load", &load, py::arg("path"));

  auto fx = m.def_submodule("fixtures", "Reference problems");
  fx.def("exsimple", &fixtures::exsimple);
  fx.def("excausal", &fixtures::excausal);
  fx.def("excausal_interior", &fixtures::excausal_interior);
  fx.def("null_focal_3d", &fixtures::null_focal_3d, py::arg("scale") = 1.0);
  fx.def("harmonic", &fixtures::harmonic, py::arg("k"));
  fx.def("random_riemannian", &random_riemannian_problem, py::arg("seed"));
  fx.def("random_lorentzian", &random_lorentzian_problem, py::arg("seed"));

  m.def(
      "scan_focal",
      [](const MorseSturmProblem& p, const Tolerances& tol) {
        require_valid(p);
        const FocalScan scan = scan_focal(solve_fundamental(p, solve_opts(tol)), p.g, scan_opts(tol));
        py::list out;
        for (const auto& f : scan.instants) out.append(focal_dict(f));
        return out;
      },
      py::arg("problem"), py::arg("tol") = Tolerances{});

  m.def(
      "maslov",
      [](const MorseSturmProblem& p, double eps, int trials, std::uint64_t seed, const Tolerances& tol) {
        require_valid(p);
        return maslov_robust(p, eps, trials, seed, solve_opts(tol), scan_opts(tol)).value;
      },
      py::arg("problem"), py::arg("eps") = 0.0, py::arg("trials") = 8, py::arg("seed") = 0,
      py::arg("tol") = Tolerances{});

  m.def(
      "_verify_json",
      [](const MorseSturmProblem& p, const Tolerances& tol, std::uint64_t seed) {
        VerifyOptions o;
        o.tol = tol;
        o.seed = seed;
        return to_json(verify(p, o)).dump();
      },
      py::arg("problem"), py::arg("tol") = Tolerances{}, py::arg("seed") = 0);

  m.def(
      "index_evolution",
      [](const MorseSturmProblem& p, const std::vector<double>& t_grid, int mesh, const Tolerances& tol) {
        require_valid(p);
        std::optional<TimelikeWitness> w;
        if (!p.g.positive_definite()) w = solve_witness(p, solve_opts(tol), tol.witness_samples);
        return evolution_trace(p, w ? &*w : nullptr, Mesh(mesh), t_grid, nullptr, tol.tol_eig, tol.tol_rank).i_of_t;
      },
      py::arg("problem"), py::arg("t_grid"), py::arg("mesh") = 128, py::arg("tol") = Tolerances{});

  m.def("chart_names", &builtin_chart_names);
  m.def(
      "trivialize",
      [](const std::string& chart_name, double T, std::optional<Vector> x0, std::optional<Vector> v0,
         std::optional<Matrix> tangent, std::optional<Matrix> sff, std::optional<Vector> witness_value,
         std::optional<Vector> witness_velocity, const Tolerances& tol) {
        const MetricChart chart = builtin_chart(chart_name);
        const int n = chart.dim;
        const Matrix tb = tangent ? *tangent : Matrix(n, 0);
        const Matrix s = sff ? *sff : Matrix(Matrix::Zero(tb.cols(), tb.cols()));
        TrivializeOptions opts;
        if (witness_value) opts.witness = WitnessSeed{*witness_value, witness_velocity ? *witness_velocity : Vector(Vector::Zero(n))};
        const SolveOptions so = solve_opts(tol);
        const GeodesicPath path =
            integrate_geodesic(chart, GeodesicSeed{x0 ? *x0 : Vector(Vector::Zero(n)), v0 ? *v0 : Vector(Vector::Unit(n, 0)), T}, so);
        const ParallelFrame frame = parallel_frame(chart, path, so);
        return trivialize(chart, path, frame, SubmanifoldGerm{tb, s}, opts);
      },
      py::arg("chart"), py::arg("T") = 1.0, py::arg("x0") = py::none(), py::arg("v0") = py::none(),
      py::arg("tangent") = py::none(), py::arg("sff") = py::none(), py::arg("witness_value") = py::none(),
      py::arg("witness_velocity") = py::none(), py::arg("tol") = Tolerances{});
}
