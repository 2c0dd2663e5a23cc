#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skewfd/dynamics.hpp"
#include "skewfd/stencil.hpp"
#include "skewfd/verify.hpp"

namespace py = pybind11;
using namespace skewfd;

namespace {

Lattice torus_for(const Stencil& st, int per_dim) {
    switch (st.lat.kind) {
        case LatticeKind::line1d: return Lattice::line1d(per_dim, st.lat.h);
        case LatticeKind::square2d: return Lattice::square2d(per_dim, st.lat.h);
        case LatticeKind::triangular2d: return Lattice::triangular2d(per_dim, st.lat.h);
        case LatticeKind::cubic3d: return Lattice::cubic3d(per_dim, st.lat.h);
        case LatticeKind::fcc3d: return Lattice::fcc3d(per_dim, st.lat.h);
    }
    throw std::logic_error("unreachable");
}

DerivOperator operator_from_name(const std::string& name, int d) {
    if (name == "dx") return op_dx(d);
    if (name == "dxxx") return op_dxxx();
    if (name == "jacobian") return op_jacobian2d();
    if (name == "pair_vpww") return op_pair_vpww();
    if (name == "pair_vwww") return op_pair_vwww();
    if (name == "cyclic3") return op_cyclic_jacobian3();
    if (name == "det3") return op_det_grad3();
    throw std::invalid_argument("unknown operator: " + name);
}

}  // namespace

PYBIND11_MODULE(_skewfd, mod) {
    mod.doc() = "completely antisymmetric finite-difference stencils";

    py::class_<Stencil>(mod, "Stencil")
        .def_readonly("p", &Stencil::p)
        .def_readonly("m", &Stencil::m)
        .def_readonly("group", &Stencil::group_name)
        .def_readonly("empty", &Stencil::empty_warning)
        .def_property_readonly("arrow_count",
                               [](const Stencil& st) { return st.arrows.size(); })
        .def("term_count", &Stencil::term_count)
        .def("diagram", &render_diagram)
        .def("arrows", [](const Stencil& st) {
            std::vector<std::pair<std::vector<IVec>, double>> out;
            for (const auto& a : st.arrows) out.emplace_back(a.offsets, to_double(a.coef));
            return out;
        });

    mod.def("preset_names", &preset_names);
    mod.def("from_preset", &stencil_from_preset, py::arg("name"), py::arg("h") = 1.0);

    mod.def(
        "build",
        [](const std::vector<IVec>& base, const std::string& group, int dim, double h) {
            Lattice lat = dim == 1 ? Lattice::line1d(8, h)
                                   : dim == 2 ? Lattice::square2d(8, h) : Lattice::cubic3d(8, h);
            MultiIndex mi;
            for (const auto& l : base) mi.push_back({l, 0});
            return build_stencil(lat, group_from_name(group, dim, 1), mi,
                                 CouplingTensor::scalar((int)base.size()), group);
        },
        py::arg("base"), py::arg("group") = "translations", py::arg("dim") = 1,
        py::arg("h") = 1.0,
        "symmetrize a base multi-index over a signed group preset");

    mod.def(
        "tensor_entries",
        [](const Stencil& st, int per_dim) {
            auto K = to_tensor(st, torus_for(st, per_dim));
            std::vector<std::pair<Key, double>> out;
            for (const auto& [k, v] : K.entries) out.emplace_back(k, to_double(v));
            return out;
        },
        py::arg("stencil"), py::arg("per_dim") = 8,
        "materialized skew tensor as (sorted site-code key, coefficient) pairs");

    mod.def(
        "evaluate",
        [](const Stencil& st, const std::vector<std::vector<double>>& args, int per_dim) {
            auto grid = torus_for(st, per_dim);
            auto K = to_tensor(st, grid);
            return contract<double>(K, args);
        },
        py::arg("stencil"), py::arg("args"), py::arg("per_dim") = 8,
        "apply the stencil on a periodic grid (arguments indexed by site code)");

    mod.def(
        "fit_leading",
        [](const Stencil& st, const std::vector<std::string>& basis, int max_degree) {
            std::vector<DerivOperator> ops;
            for (const auto& b : basis) ops.push_back(operator_from_name(b, st.lat.d));
            auto f = fit_leading_operator(st, ops, max_degree);
            py::dict out;
            out["hpower"] = f.hpower;
            out["coefficients"] = f.coeffs;
            out["exact"] = f.exact;
            out["float_agreement"] = f.float_agreement;
            return out;
        },
        py::arg("stencil"), py::arg("basis"), py::arg("max_degree") = 5,
        "exact identification of the leading differential operator");

    mod.def(
        "order_estimate",
        [](const Stencil& st, const std::string& target, double coef, int scale_power,
           int levels, double h0, unsigned seed) {
            auto op = operator_from_name(target, st.lat.d);
            for (auto& t : op.terms) t.coef *= Rat((long long)coef);
            auto s = order_estimate(st, op, test_tuples(st.lat.d, st.p, 3, seed), scale_power,
                                    levels, h0);
            py::dict out;
            out["hs"] = s.hs;
            out["errors"] = s.errors;
            out["slope"] = s.slope;
            out["residual"] = s.residual;
            return out;
        },
        py::arg("stencil"), py::arg("target"), py::arg("coef") = 1.0,
        py::arg("scale_power") = 0, py::arg("levels") = 5, py::arg("h0") = 0.1,
        py::arg("seed") = 7, "refinement study against coef * target");

    mod.def(
        "conservation_residual",
        [](const Stencil& st, const std::vector<std::vector<double>>& grads, int per_dim) {
            auto K = to_tensor(st, torus_for(st, per_dim));
            return conservation_residual(K, grads);
        },
        py::arg("stencil"), py::arg("grads"), py::arg("per_dim") = 8,
        "max over slots of the invariant's time derivative");

    mod.def(
        "simulate_euler2d",
        [](int n, double dt, int steps, const std::string& method,
           const std::vector<double>& q0) {
            double h = 2 * 3.141592653589793 / n;
            auto sys = euler2d_system(n, h);
            auto rec = integrate(sys, q0, dt, steps, method_from_name(method));
            py::dict out;
            out["times"] = rec.times;
            out["integrals"] = rec.integrals;
            std::vector<std::string> names;
            for (const auto& I : sys.integrals) names.push_back(I.name);
            out["names"] = names;
            return out;
        },
        py::arg("n"), py::arg("dt"), py::arg("steps"), py::arg("method"), py::arg("q0"),
        "conservative vorticity integration on an n x n torus (q0 must be mean-zero)");
}
