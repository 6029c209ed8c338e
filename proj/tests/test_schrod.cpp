#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdef/errors.hpp"
#include "qdef/repcls.hpp"
#include "qdef/schrod.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace qdef;
using std::numbers::pi;

TEST_CASE("closed-form f1 and f2 branches solve their ODEs") {
    Grid g = Grid::span(-3, 3, 1e-3);
    struct Case { double s; F1Branch b1; F2Branch b2; };
    for (Case c : {Case{0.7, F1Branch::Tan, F2Branch::Secant}, Case{1.2, F1Branch::Tan, F2Branch::Secant},
                   Case{2.3, F1Branch::Tanh, F2Branch::Sech}, Case{2.9, F1Branch::Tanh, F2Branch::Sech},
                   Case{2.3, F1Branch::ConstantHyperbolic, F2Branch::Exponential},
                   Case{pi / 2, F1Branch::Linear, F2Branch::Constant}}) {
        Deformation d(c.s);
        RealizationConstants k;
        k.F1 = 1.5;
        k.F2 = 0.7;
        auto fns = make_realization(d, 1.0, g, c.b1, c.b2, k);
        CAPTURE(c.s);
        CHECK(f1_ode_residual(d, fns.f1) < 1e-9);
        CHECK(f2_ode_residual(d, fns.f1, fns.f2) < 1e-9);
    }
}

TEST_CASE("a nonzero sech phase d1 is not a solution while f1 keeps d = 0") {
    Deformation d(2.3);
    Grid g = Grid::span(-3, 3, 1e-3);
    RealizationConstants k;
    k.d1 = 0.3;
    auto fns = make_realization(d, 1.0, g, F1Branch::Tanh, F2Branch::Sech, k);
    CHECK(f2_ode_residual(d, fns.f1, fns.f2) > 0.1);
}

TEST_CASE("tan and tanh approach -r as cos s goes to zero") {
    Grid g = Grid::span(-1, 1, 1e-3);
    for (double s : {std::acos(1e-3), std::acos(-1e-3)}) {
        Deformation d(s);
        auto f1 = solve_f1(d, default_f1_branch(d), g);
        double worst = 0;
        for (long i = 0; i < g.count; ++i) worst = std::max(worst, std::abs(f1.v[i] + g.at(i)));
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("branch mismatches are rejected") {
    Grid g = Grid::span(-1, 1, 1e-2);
    CHECK_THROWS_AS(solve_f1(Deformation(0.5), F1Branch::Tanh, g), BranchMismatch);
    CHECK_THROWS_AS(solve_f1(Deformation(2.5), F1Branch::Tan, g), BranchMismatch);
    auto f1 = solve_f1(Deformation(0.5), F1Branch::Tan, g);
    CHECK_THROWS_AS(solve_f2(Deformation(0.5), f1, F2Branch::Sech, {}), BranchMismatch);
}

TEST_CASE("liouville factor examples") {
    Grid g = Grid::span(-2, 2, 1e-3);
    // linear f1 = -r with kappa = 1: 2a' - r a = 0
    auto lin = solve_f1(Deformation(pi / 2), F1Branch::Linear, g);
    auto a = liouville_factor(lin, 1.0, LiouvilleMode::FirstDerivativeElimination);
    auto lit = liouville_factor(lin, 1.0, LiouvilleMode::Literal);
    double ea = 0, el = 0;
    for (long i = 0; i < g.count; ++i) {
        double r = g.at(i);
        ea = std::max(ea, std::abs(a.v[i] / std::exp(r * r / 4) - 1));
        el = std::max(el, std::abs(lit.v[i] / std::exp(r * r / 2) - 1));
    }
    CHECK(ea < 1e-6);
    CHECK(el < 1e-6);

    // constant f1 = 1/sqrt(-cos s): a = exp(-kappa r / (2 sqrt(-cos s)))
    Deformation d(2.5);
    auto cst = solve_f1(d, F1Branch::ConstantHyperbolic, g);
    double kappa = 0.8;
    auto ac = liouville_factor(cst, kappa, LiouvilleMode::FirstDerivativeElimination);
    double ec = 0, cc = kappa / std::sqrt(-d.cos_s);
    for (long i = 0; i < g.count; ++i) ec = std::max(ec, std::abs(ac.v[i] / std::exp(-cc * g.at(i) / 2) - 1));
    CHECK(ec < 1e-6);
}

TEST_CASE("the transform removes the first-derivative term") {
    Grid g = Grid::span(-1.2, 1.2, 1e-3);
    for (double s : {0.6, 1.3}) {
        auto fns = make_realization(Deformation(s), 1.5, g, F1Branch::Tan, F2Branch::Secant);
        CHECK(transform_first_derivative_residual(fns) < 1e-8);
    }
    auto fns = make_realization(Deformation(2.4), 1.0, Grid::span(-4, 4, 1e-3), F1Branch::Tanh, F2Branch::Sech);
    CHECK(transform_first_derivative_residual(fns) < 1e-8);
}

TEST_CASE("harmonic regime: V at s = pi/2 with integer m") {
    Grid g = Grid::span(-3, 3, 1e-3);
    for (double m : {0.0, 1.0, 2.0, -3.0}) {
        auto pot = build_potential(make_realization(Deformation(pi / 2), m, g, F1Branch::Linear, F2Branch::Constant));
        // least squares quadratic through all samples
        Eigen::MatrixXd A(g.count, 3);
        Eigen::VectorXd y(g.count);
        for (long i = 0; i < g.count; ++i) {
            double r = g.at(i);
            A(i, 0) = 1;
            A(i, 1) = r;
            A(i, 2) = r * r;
            y(i) = pot.values[i];
        }
        Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
        double rel = (A * coef - y).norm() / std::max(1.0, y.norm());
        CHECK(rel < 1e-8);
        double lo = *std::min_element(pot.values.begin(), pot.values.end());
        double hi = *std::max_element(pot.values.begin(), pot.values.end());
        CHECK(hi - lo < 1e-9 * std::max(1.0, std::abs(hi)));
    }
}

TEST_CASE("V is periodic with period pi/sqrt(cos s)") {
    for (double s : {0.5, 1.1}) {
        Deformation d(s);
        double P = pi / std::sqrt(d.cos_s);
        long n = 4000;
        Grid g{-P, P / n, 2 * n + 1};
        auto pot = build_potential(make_realization(d, 1.0, g, F1Branch::Tan, F2Branch::Secant));
        double worst = 0;
        for (long i = 0; i + n < g.count; ++i) {
            if (pot.pole_mask[i] || pot.pole_mask[i + n]) continue;
            double a = pot.values[i], b = pot.values[i + n];
            // compare away from the poles where V is of order one
            if (std::abs(a) > 1e3) continue;
            worst = std::max(worst, std::abs(a - b));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("eigensolver oracles: box and Poschl-Teller") {
    SUBCASE("particle in a box converges at second order") {
        auto build = [](double h) {
            Grid g = Grid::span(0, 1, h);
            return potential_from_values(g, std::vector<double>(g.count, 0.0));
        };
        auto ratios = richardson_ratios(build, 2e-3, 3);
        for (double r : ratios) {
            CHECK(r > 3.5);
            CHECK(r < 4.5);
        }
        auto e = eigensolve(build(1e-3), 2);
        CHECK(e.eigenvalues[0] == doctest::Approx(pi * pi).epsilon(1e-5));
        CHECK(e.eigenvalues[1] == doctest::Approx(4 * pi * pi).epsilon(1e-5));
    }
    SUBCASE("Poschl-Teller lambda = 2") {
        Grid g = Grid::span(-15, 15, 1e-3);
        std::vector<double> v(g.count);
        for (long i = 0; i < g.count; ++i) v[i] = -6 / std::pow(std::cosh(g.at(i)), 2);
        auto e = eigensolve(potential_from_values(g, v), 2);
        CHECK(std::abs(e.eigenvalues[0] + 4) < 5e-3);
        CHECK(std::abs(e.eigenvalues[1] + 1) < 5e-3);
        CHECK(e.self_residual[0] < 1e-5);
    }
    SUBCASE("too few samples") {
        Grid g = Grid::span(0, 1, 0.01);
        CHECK_THROWS_AS(eigensolve(potential_from_values(g, std::vector<double>(g.count, 0.0)), 1), InsufficientGrid);
    }
}

TEST_CASE("Morse-like well on the exponential branch") {
    Grid g = Grid::span(-10, 10, 1e-3);
    RealizationConstants k;
    k.F2 = -1;
    auto pot = build_potential(
        make_realization(Deformation(3.045), 1.0, g, F1Branch::ConstantHyperbolic, F2Branch::Exponential, k));
    auto it = std::min_element(pot.values.begin(), pot.values.end());
    long imin = it - pot.values.begin();
    CHECK(imin > 0);
    CHECK(imin < g.count - 1);
    CHECK(pot.values.back() > pot.values.front());
    auto e = eigensolve(pot, 1);
    CHECK(e.eigenvalues[0] < pot.values.front());
    CHECK(e.eigenvalues[0] > *it);
}

TEST_CASE("ladder operator in the decoupled regime") {
    Deformation d(pi - 1e-4);
    Grid g = Grid::span(-40, 40, 2e-3);
    auto fns = make_realization(d, 2.0, g, F1Branch::Tanh, F2Branch::Sech);
    auto pot = build_potential(fns);
    CHECK(pot.decoupled);
    auto e = eigensolve(pot, 1);
    auto up = build_potential(make_realization(d, 3.0, g, F1Branch::Tanh, F2Branch::Sech));

    auto L = ladder_apply(e.eigenvectors[0], e.first, fns, +1, e.eigenvalues[0]);
    double res = casimir_residual(L.psi, up, e.first, e.eigenvalues[0]);
    CHECK(res <= 20 * e.self_residual[0]);
    CHECK_FALSE(L.leaves_unitary);

    // the lowered ground state is annihilated
    auto D = ladder_apply(e.eigenvectors[0], e.first, fns, -1, e.eigenvalues[0]);
    CHECK(D.norm_ratio < 1e-5);

    auto Z = ladder_apply(std::vector<double>(e.eigenvectors[0].size(), 0.0), e.first, fns, +1, e.eigenvalues[0]);
    CHECK(Z.norm_ratio == 0.0);
}

TEST_CASE("coupled mode with f2 = 0 gives a constant Casimir") {
    Deformation d(2.5);
    Grid g = Grid::span(-3, 3, 1e-3);
    auto f1 = solve_f1(d, F1Branch::ConstantHyperbolic, g);
    auto f2 = solve_f2(d, f1, F2Branch::Zero, {});
    auto r = coupled_solve(d, 1.3, f1, f2);
    CHECK(r.success);
    CHECK(r.residual < 1e-8);
    CHECK(std::isfinite(r.c_estimate));

    CHECK_THROWS_AS(coupled_solve(Deformation(pi / 3), 1.3, solve_f1(Deformation(pi / 3), F1Branch::Tan, g), f2),
                    DomainError);
}

TEST_CASE("disjoint support profiles") {
    Grid g = Grid::span(-2, 3, 1e-3);
    auto [f1, f2] = disjoint_support_pair(g, {{0, 1.0}, {2, -0.5}}, {{1, 2.0}}, 0.1);
    for (long i = 0; i < g.count; ++i) CHECK(f1.v[i] * f2.v[i] == 0.0);
    CHECK(f1.v[g.center()] != 0.0);
    CHECK_THROWS_AS(disjoint_support_pair(g, {{0, 1.0}}, {{0, 2.0}}, 0.1), DomainError);
    auto [e1, e2] = disjoint_support_pair(g, {}, {}, 0.1);
    CHECK(*std::max_element(e1.v.begin(), e1.v.end()) == 0.0);
}

TEST_CASE("commensurate ingredients repeat, incommensurate ones do not") {
    long n = 40000;
    double h = 0.01;
    std::vector<double> rat(n), irr(n);
    std::vector<bool> none(n, false);
    for (long i = 0; i < n; ++i) {
        double r = i * h;
        rat[i] = std::cos(2 * pi * r) + std::cos(2 * pi * r * 0.5);
        irr[i] = std::cos(2 * pi * r) + std::cos(2 * pi * r * (std::sqrt(5.0) - 1) / 2);
    }
    double cr = secondary_autocorrelation(rat, none, 150, 250);
    double ci = secondary_autocorrelation(irr, none, 150, 250);
    CHECK(cr > 0.999);
    CHECK(ci < cr);
    CHECK(ci < 0.95);
}

TEST_CASE("eigensolve_cells solves each run between poles") {
    Deformation d(1.0);
    double P = pi / std::sqrt(d.cos_s);
    Grid g = Grid::span(-1.5 * P, 1.5 * P, 1e-3);
    auto pot = build_potential(make_realization(d, 1.0, g, F1Branch::Tan, F2Branch::Secant));
    auto runs = unmasked_runs(pot.pole_mask);
    CHECK(runs.size() >= 3);
    auto cells = eigensolve_cells(pot, 2);
    CHECK(cells.size() >= 2);
    for (auto& c : cells) CHECK(c.eigenvalues[0] < c.eigenvalues[1]);
}
