#include "spraylab/geodesics.hpp"
#include "spraylab/involutivity.hpp"
#include "spraylab/metrizability.hpp"
#include "spraylab/presets.hpp"
#include "spraylab/report.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spraylab;

namespace {

RunOptions run_options(std::uint64_t seed, int samples, double tol) { return {seed, samples, tol}; }

std::string dump(const CommandResult& r) { return r.report.dump(); }

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Sprays, projective metrizability, formal integrability and geodesics";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<EvalError>(m, "EvalError", PyExc_ArithmeticError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    py::class_<Point>(m, "Point")
        .def(py::init([](std::vector<double> x, std::vector<double> y) { return Point{std::move(x), std::move(y)}; }),
             py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y)
        .def("__repr__", [](const Point& p) { return py::str("Point(x={}, y={})").format(p.x, p.y); });

    py::class_<Expression>(m, "Expression")
        .def("__str__", [](const Expression& e) { return to_string(e); })
        .def("__repr__", [](const Expression& e) { return "Expression('" + to_string(e) + "')"; })
        .def("__call__", [](const Expression& e, const Point& p) { return eval(e, p); });

    m.def("parse", [](const std::string& s, int n) { return parse(s, n); }, py::arg("text"), py::arg("n"));
    m.def("simplify", &simplify);
    m.def(
        "diff",
        [](const Expression& e, const std::string& kind, int index) {
            if (kind != "x" && kind != "y") throw py::value_error("kind must be 'x' or 'y'");
            return diff(e, Variable{kind == "x" ? VarKind::base : VarKind::fiber, index});
        },
        py::arg("expr"), py::arg("kind"), py::arg("index"));
    m.def("eval", &eval);
    m.def("sample_points", &sample_points, py::arg("n"), py::arg("count"), py::arg("seed") = 42);

    py::class_<Spray>(m, "Spray")
        .def(py::init(&Spray::parse), py::arg("dim"), py::arg("G"))
        .def_readonly("n", &Spray::n)
        .def_property_readonly("G", [](const Spray& s) {
            std::vector<std::string> out;
            for (const auto& g : s.G) out.push_back(to_string(g));
            return out;
        });
    m.def("preset", [](const std::string& name) { return preset(name).spray; });
    m.def("preset_names", &preset_names);

    m.def(
        "classify",
        [](const Spray& S, int samples, std::uint64_t seed) {
            return to_string(classify(S, sample_points(S.n, samples, seed)).kind);
        },
        py::arg("spray"), py::arg("samples") = 50, py::arg("seed") = 42);
    m.def(
        "identities",
        [](const Spray& S, int samples, std::uint64_t seed, double tol) {
            py::dict out;
            for (const auto& c : identity_suite(S, sample_points(S.n, samples, seed), tol))
                out[py::str(c.name)] = to_string(c.verdict.level);
            return out;
        },
        py::arg("spray"), py::arg("samples") = 50, py::arg("seed") = 42, py::arg("tol") = 1e-9);

    m.def(
        "check_conditions",
        [](const Spray& S, const std::vector<std::string>& theta, int samples, std::uint64_t seed, double tol) {
            std::vector<Expression> comps;
            for (const auto& t : theta) comps.push_back(parse(t, S.n));
            const ConditionReport r = check_conditions(S, SemiBasicOneForm(S.n, comps), sample_points(S.n, samples, seed), tol);
            py::dict out;
            for (const auto& v : r.verdicts) out[py::str(v.name)] = to_string(v.status);
            return out;
        },
        py::arg("spray"), py::arg("theta"), py::arg("samples") = 50, py::arg("seed") = 42, py::arg("tol") = 1e-9);

    py::class_<CartanBasisResult>(m, "CartanBasisResult")
        .def_readonly("dims", &CartanBasisResult::dims)
        .def_readonly("sum", &CartanBasisResult::sum)
        .def_readonly("equality", &CartanBasisResult::equality);
    py::class_<DimensionReport>(m, "DimensionReport")
        .def_readonly("dim_g1", &DimensionReport::dim_g1)
        .def_readonly("dim_g2", &DimensionReport::dim_g2)
        .def_readonly("quasi_regular", &DimensionReport::quasi_regular)
        .def_readonly("unshifted", &DimensionReport::unshifted)
        .def_readonly("indeterminate", &DimensionReport::indeterminate)
        .def("verdict", &DimensionReport::verdict);
    m.def("cartan_test", &cartan_test, py::arg("spray"), py::arg("point"));

    py::class_<GeodesicTrace>(m, "GeodesicTrace")
        .def_readonly("t", &GeodesicTrace::t)
        .def_readonly("x", &GeodesicTrace::x)
        .def_readonly("y", &GeodesicTrace::y)
        .def_readonly("step", &GeodesicTrace::step)
        .def_readonly("halted", &GeodesicTrace::halted)
        .def_readonly("halt_reason", &GeodesicTrace::halt_reason)
        .def("to_csv", [](const GeodesicTrace& t) { return to_csv(t); });
    m.def(
        "integrate",
        [](const Spray& S, const std::vector<double>& x0, const std::vector<double>& y0, double T, int steps) {
            return integrate(S, x0, y0, T, steps);
        },
        py::arg("spray"), py::arg("x0"), py::arg("y0"), py::arg("T"), py::arg("steps"));
    m.def("ode_residual", &ode_residual);
    m.def("trace_compare", &trace_compare);
    m.def(
        "projective_factor",
        [](const Spray& a, const Spray& b, int samples, std::uint64_t seed, double tol) {
            const EquivalenceReport r = projective_factor(a, b, sample_points(a.n, samples, seed), tol);
            py::dict out;
            out["passed"] = r.passed();
            out["parallel"] = r.parallel;
            out["homogeneous"] = r.homogeneous;
            std::vector<double> P;
            for (const auto& s : r.samples) P.push_back(s.P);
            out["P"] = P;
            if (r.witness) out["witness"] = *r.witness;
            return out;
        },
        py::arg("S1"), py::arg("S2"), py::arg("samples") = 50, py::arg("seed") = 42, py::arg("tol") = 1e-9);

    // Full command reports as JSON text.
    m.def(
        "analyze",
        [](const std::string& source, std::uint64_t seed, int samples, double tol) {
            return dump(cmd_analyze(definition_from_source(source), run_options(seed, samples, tol)));
        },
        py::arg("source"), py::arg("seed") = 42, py::arg("samples") = 50, py::arg("tol") = 1e-9);
    m.def(
        "metrizable",
        [](const std::string& source, std::optional<std::string> finsler, std::optional<std::vector<std::string>> theta,
           std::uint64_t seed, int samples, double tol) {
            return dump(cmd_metrizable(definition_from_source(source), run_options(seed, samples, tol),
                                       MetrizableOptions{std::move(finsler), std::move(theta)}));
        },
        py::arg("source"), py::arg("finsler") = py::none(), py::arg("theta") = py::none(), py::arg("seed") = 42,
        py::arg("samples") = 50, py::arg("tol") = 1e-9);
    m.def(
        "involutivity",
        [](const std::string& source, int n_points, std::uint64_t seed) {
            return dump(cmd_involutivity(definition_from_source(source), run_options(seed, 50, 1e-9), n_points));
        },
        py::arg("source"), py::arg("n_points") = 10, py::arg("seed") = 42);
}
