// Python bindings for the main operations: pointwise spectral tests,
// positivity-cone verdicts, grid calculus, heat smoothing, and the
// verification suite.
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kpsh/calculus.hpp"
#include "kpsh/constructions.hpp"
#include "kpsh/forms.hpp"
#include "kpsh/frames.hpp"
#include "kpsh/heat.hpp"
#include "kpsh/hermitian.hpp"
#include "kpsh/positivity.hpp"
#include "kpsh/potentials.hpp"
#include "kpsh/suite.hpp"

namespace py = pybind11;
using namespace kpsh;

namespace {

HermitianMatrix matrix_from_rows(const std::vector<std::vector<cplx>>& rows) {
    const int n = static_cast<int>(rows.size());
    std::vector<cplx> a;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n)
            throw contract_error("matrix rows must form a square matrix");
        a.insert(a.end(), r.begin(), r.end());
    }
    return HermitianMatrix(n, std::move(a), 1e-9);
}

ComplexFrame frame_from_columns(int n, const std::vector<std::vector<cplx>>& cols) {
    return ComplexFrame(n, static_cast<int>(cols.size()), cols);
}

py::dict verdict_dict(const PositivityVerdict& v) {
    py::dict d;
    d["positive"] = v.positive;
    d["margin"] = v.margin;
    d["grade"] = v.grade == PositivityVerdict::Grade::exact ? "exact" : "sampled";
    if (v.witness) {
        std::vector<std::vector<cplx>> cols;
        for (int k = 0; k < v.witness->p(); ++k) cols.push_back(v.witness->column(k));
        d["witness"] = cols;
    } else {
        d["witness"] = py::none();
    }
    return d;
}

GridDomain make_grid(int n, std::vector<int> shape, std::vector<double> spacing,
                     std::vector<double> origin, const std::string& topology) {
    GridDomain d;
    d.n = n;
    d.shape = std::move(shape);
    d.spacing = std::move(spacing);
    d.origin = std::move(origin);
    d.topology = topology == "torus" ? GridDomain::Topology::torus : GridDomain::Topology::box;
    d.validate();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "numerics for omega^q-plurisubharmonic functions on flat Kaehler grids";

    py::register_exception<contract_error>(m, "ContractError", PyExc_ValueError);
    py::register_exception<consistency_error>(m, "ConsistencyError", PyExc_RuntimeError);

    // Pointwise spectral tests.
    m.def(
        "eigenvalues",
        [](const std::vector<std::vector<cplx>>& rows) {
            return hermitian_eigenvalues(matrix_from_rows(rows)).values;
        },
        py::arg("matrix"), "ascending eigenvalues of a Hermitian matrix");
    m.def(
        "psh_margin",
        [](const std::vector<std::vector<cplx>>& rows, int q) {
            return psh_margin(matrix_from_rows(rows), q);
        },
        py::arg("matrix"), py::arg("q"), "sum of the q smallest eigenvalues");
    m.def(
        "is_strongly_q_convex",
        [](const std::vector<std::vector<cplx>>& rows, int q) {
            return is_strongly_q_convex(matrix_from_rows(rows), q);
        },
        py::arg("matrix"), py::arg("q"));
    m.def(
        "kyfan_min_trace",
        [](const std::vector<std::vector<cplx>>& rows, int q, int trials, std::uint64_t seed) {
            return kyfan_min_trace(matrix_from_rows(rows), q, trials, seed);
        },
        py::arg("matrix"), py::arg("q"), py::arg("trials") = 16,
        py::arg("seed") = 20260823ULL,
        "min of Re tr(P* H P) over orthonormal q-frames (independent oracle)");

    // Forms and cone tests (JSON surface for the sparse coefficient maps).
    m.def("omega_std_json", [](int n) { return omega_std(n).to_json(); }, py::arg("n"));
    m.def(
        "nu_wedge_omega_k_json",
        [](const std::vector<std::vector<cplx>>& nu, int k) {
            return nu_wedge_omega_k(matrix_from_rows(nu), k).to_json();
        },
        py::arg("nu"), py::arg("k"));
    m.def(
        "wedge_json",
        [](const std::string& a, const std::string& b) {
            return wedge(ComplexForm::from_json(a), ComplexForm::from_json(b)).to_json();
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "restrict_complex",
        [](const std::string& form, const std::vector<std::vector<cplx>>& cols) {
            const ComplexForm f = ComplexForm::from_json(form);
            return restrict_complex(f, frame_from_columns(f.n(), cols));
        },
        py::arg("form_json"), py::arg("frame_columns"));
    m.def(
        "weak_positivity_test",
        [](const std::string& form, int trials, double tol, std::uint64_t seed) {
            return verdict_dict(weak_positivity_test(ComplexForm::from_json(form), trials,
                                                     tol, seed));
        },
        py::arg("form_json"), py::arg("trials") = 64, py::arg("tol") = 1e-9,
        py::arg("seed") = 20260823ULL);
    m.def(
        "strong_positivity_certificate",
        [](const std::string& form, int dict_size, double tol, std::uint64_t seed) {
            return verdict_dict(strong_positivity_certificate(ComplexForm::from_json(form),
                                                              dict_size, tol, seed));
        },
        py::arg("form_json"), py::arg("dict_size") = 256, py::arg("tol") = 1e-8,
        py::arg("seed") = 20260823ULL);

    // Grids, fields and calculus.
    py::class_<GridDomain>(m, "GridDomain")
        .def(py::init(&make_grid), py::arg("n"), py::arg("shape"), py::arg("spacing"),
             py::arg("origin"), py::arg("topology") = "box")
        .def_readonly("n", &GridDomain::n)
        .def_readonly("shape", &GridDomain::shape)
        .def_readonly("spacing", &GridDomain::spacing)
        .def_readonly("origin", &GridDomain::origin)
        .def("size", &GridDomain::size);

    py::class_<ScalarField>(m, "ScalarField")
        .def_readonly("domain", &ScalarField::domain)
        .def_readonly("values", &ScalarField::values)
        .def_static(
            "sample",
            [](const GridDomain& d, const std::function<double(std::vector<double>)>& f) {
                return ScalarField::sample(d, f);
            },
            py::arg("domain"), py::arg("fn"));

    m.def("heat_smooth", &heat_smooth, py::arg("field"), py::arg("t"),
          "spectral heat flow on a torus field");
    m.def(
        "psh_margin_field_min",
        [](const ScalarField& f, int q) {
            const ScalarField mf = psh_margin_field(f, q);
            double mn = 1e300;
            for (std::int64_t i = 0; i < f.domain.size(); ++i)
                if (mf.masked_in(i)) mn = std::min(mn, mf.values[i]);
            return mn;
        },
        py::arg("field"), py::arg("q"),
        "min of the pointwise q-margin over the stencil interior");
    m.def(
        "ddc_at",
        [](const ScalarField& f, const std::vector<int>& idx) {
            const HermitianMatrix h = ddc_at(f, idx);
            std::vector<std::vector<cplx>> rows(h.n(), std::vector<cplx>(h.n()));
            for (int i = 0; i < h.n(); ++i)
                for (int j = 0; j < h.n(); ++j) rows[i][j] = h(i, j);
            return rows;
        },
        py::arg("field"), py::arg("index"));
    m.def("regularized_max",
          py::overload_cast<double, double, double>(&regularized_max), py::arg("x"),
          py::arg("y"), py::arg("eps"));

    // Verification suite.
    m.def(
        "run_suite",
        [](std::uint64_t seed) {
            const SuiteResult r = run_suite(seed);
            py::list crits;
            for (const CriterionResult& c : r.criteria) {
                py::dict d;
                d["id"] = c.id;
                d["name"] = c.name;
                d["passed"] = c.passed;
                d["detail"] = c.detail;
                d["seconds"] = c.seconds;
                crits.append(d);
            }
            py::dict out;
            out["seed"] = r.seed;
            out["all_passed"] = r.all_passed();
            out["criteria"] = crits;
            return out;
        },
        py::arg("seed") = 7ULL, "run the full verification battery");
}
