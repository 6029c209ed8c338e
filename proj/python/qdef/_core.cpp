#include "qdef/errors.hpp"
#include "qdef/geometry.hpp"
#include "qdef/hopfgen.hpp"
#include "qdef/matrep.hpp"
#include "qdef/qnum.hpp"
#include "qdef/repcls.hpp"
#include "qdef/schrod.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qdef;

namespace {

py::dict descriptor_dict(const RepDescriptor& r) {
    py::dict d;
    d["cls"] = to_string(r.cls);
    d["c"] = r.c;
    d["s"] = r.s;
    d["finite"] = r.finite;
    d["m_list"] = r.m_list;
    d["N"] = r.N;
    d["k"] = r.k;
    d["m0"] = r.m0;
    d["period"] = r.period;
    d["strange"] = r.strange;
    d["m_rule"] = r.m_rule();
    return d;
}

PotentialParams potential_params(double s, double m, double start, double stop, double step, const std::string& f1,
                                 const std::string& f2) {
    Deformation d(s);
    PotentialParams p;
    p.s = s;
    p.m = m;
    p.f1 = f1 == "auto" ? default_f1_branch(d) : parse_f1_branch(f1);
    p.f2 = f2 == "auto" ? partner_f2_branch(p.f1) : parse_f2_branch(f2);
    p.grid = Grid::span(start, stop, step);
    return p;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "q-deformed su(2) toolkit at q = exp(is)";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);

    m.def("qnumber", [](double x, double s) { return qnumber(x, Deformation(s)); }, py::arg("x"), py::arg("s"));
    m.def("thresholds", [](double s) {
        auto t = thresholds(Deformation(s));
        return py::make_tuple(t.c0, t.c1, t.c2);
    }, py::arg("s"), "(c0, c1, c2)");
    m.def("unitary_ok", [](double s, double c, double mm) { return unitary_ok(Deformation(s), c, mm); },
          py::arg("s"), py::arg("c"), py::arg("m"));
    m.def("classify", [](double s, double c) {
        py::list out;
        for (const auto& r : classify(Deformation(s), c)) out.append(descriptor_dict(r));
        return out;
    }, py::arg("s"), py::arg("c"));

    m.def("build_rep", [](double s, double c, const std::vector<double>& basis) {
        RepTriple t = build_rep(Deformation(s), c, basis);
        return py::make_tuple(Eigen::MatrixXd(t.Jz.entries.real()), Eigen::MatrixXd(t.Jplus.entries.real()),
                              Eigen::MatrixXd(t.Jminus.entries.real()));
    }, py::arg("s"), py::arg("c"), py::arg("basis"), "(Jz, J+, J-) as real matrices");
    m.def("verify_algebra", [](double s, double c, const std::vector<double>& basis, int margin) {
        Deformation d(s);
        AlgebraReport a = verify_algebra(build_rep(d, c, basis), d, c, margin);
        py::dict r;
        r["jz_jpm"] = a.res_jz_jpm;
        r["jp_jm"] = a.res_jp_jm;
        r["casimir"] = a.res_casimir;
        r["casimir_forms"] = a.res_casimir_forms;
        r["casimir_commute"] = a.res_casimir_commute;
        r["hermiticity"] = a.hermiticity;
        r["maekawa_s"] = a.maekawa_s;
        r["maekawa_2s_spread"] = a.maekawa_2s_spread;
        r["margin"] = a.margin;
        return r;
    }, py::arg("s"), py::arg("c"), py::arg("basis"), py::arg("margin") = -1);

    m.def("potential", [](double s, double mm, double start, double stop, double step, const std::string& f1,
                          const std::string& f2) {
        auto pot = build_potential(potential_params(s, mm, start, stop, step, f1, f2));
        std::vector<double> r(pot.grid.count);
        for (long i = 0; i < pot.grid.count; ++i) r[i] = pot.grid.at(i);
        return py::make_tuple(r, pot.values, pot.pole_mask);
    }, py::arg("s"), py::arg("m"), py::arg("start") = -5.0, py::arg("stop") = 5.0, py::arg("step") = 1e-3,
       py::arg("f1") = "auto", py::arg("f2") = "auto", "(r, V, pole_mask)");
    m.def("eigenvalues", [](double start, double step, const std::vector<double>& v, int n) {
        Grid g{start, step, (long)v.size()};
        return eigensolve(potential_from_values(g, v), n).eigenvalues;
    }, py::arg("start"), py::arg("step"), py::arg("V"), py::arg("n") = 4,
       "hard-wall levels of -d^2/dr^2 + V on a uniform grid");

    m.def("unitarity_window", [](double alpha, double f_lo, double f_hi, double c) {
        GenDeformation gd(alpha, BProfile::sech(f_lo, f_hi));
        auto w = unitarity_window(c, gd);
        py::dict r;
        r["L1"] = w.L1;
        r["L2"] = w.L2;
        r["l1"] = w.l1;
        r["l2"] = w.l2;
        r["f_min"] = w.f_min;
        r["f_max"] = w.f_max;
        r["empty"] = w.empty;
        r["c_min"] = window_c_min(gd);
        return r;
    }, py::arg("alpha"), py::arg("f_lo"), py::arg("f_hi"), py::arg("c"));
    m.def("hopf_report", [](double alpha, double f_lo, double f_hi, int dim, double c) {
        GenDeformation gd(alpha, BProfile::sech(f_lo, f_hi));
        GenRep rep = build_gen_rep(gd, dim, c);
        auto h = hopf_axiom_report(gd, rep);
        auto ch = check_gen_rep(gd, rep);
        py::dict r;
        r["coassoc"] = std::max({h.coassoc_jp, h.coassoc_jm, h.coassoc_g, h.coassoc_ginv});
        r["counit"] = h.counit;
        r["antipode"] = std::max(h.antipode_left, h.antipode_right);
        r["antipode_half"] = std::max(h.antipode_half_left, h.antipode_half_right);
        r["homomorphism"] = h.homomorphism;
        r["commutator"] = ch.commutator;
        r["rescaling"] = std::max(ch.rescale_plus, ch.rescale_minus);
        return r;
    }, py::arg("alpha") = 2.0, py::arg("f_lo") = 1.2, py::arg("f_hi") = 2.5, py::arg("dim") = 12, py::arg("c") = 5.0);

    m.def("spectral_flow", [](double m_max, const std::vector<double>& s_grid) {
        auto ft = spectral_flow(m_max, s_grid);
        std::vector<std::tuple<double, double, double, bool>> cr;
        for (auto& c : ft.crossings) cr.emplace_back(c.s, c.m1, c.m2, c.tangential);
        return py::make_tuple(ft.m_values, ft.curves, cr);
    }, py::arg("m_max"), py::arg("s_grid"), "(m_values, curves, crossings)");
    m.def("transition", [](double c, const std::vector<double>& s_grid) {
        auto t = topology_transition(c, s_grid);
        return t.found ? py::object(py::float_(t.s_star)) : py::object(py::none());
    }, py::arg("c"), py::arg("s_grid"));
}
