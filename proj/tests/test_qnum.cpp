#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdef/errors.hpp"
#include "qdef/qnum.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qdef;
using std::numbers::pi;

TEST_CASE("bracket at simple points") {
    CHECK(qnumber(1, Deformation(0.7)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(qnumber(2, Deformation(pi / 2))) < 1e-15);
    CHECK(qnumber(2, Deformation(pi / 3)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(qnumber(0.5, Deformation(1e-8)) - 0.5) < 1e-12);
}

TEST_CASE("singular deformations are rejected") {
    CHECK_THROWS_AS((void)Deformation(0.0), SingularDeformation);
    CHECK_THROWS_AS((void)Deformation(pi), SingularDeformation);
    CHECK_THROWS_AS((void)Deformation(-2 * pi + 1e-13), SingularDeformation);
    CHECK_THROWS_AS((void)Deformation(NAN), SingularDeformation);
    CHECK_NOTHROW((void)Deformation(1e-6));
}

TEST_CASE("eta squared") {
    Deformation d(1.1);
    CHECK(d.eta_sq == -4 * d.sin_s * d.sin_s);
    CHECK(d.eta_sq <= 0);
}

TEST_CASE("complex bracket") {
    Deformation d(1.0);
    auto r = qnumber_complex({0.8, 0.0}, d);
    CHECK(r.real() == doctest::Approx(qnumber(0.8, d)).epsilon(1e-14));
    CHECK(r.imag() == 0.0);
    auto i = qnumber_complex({0.0, 1.0}, d);
    CHECK(std::abs(i.real()) < 1e-15);
    CHECK(i.imag() == doctest::Approx(std::sinh(1.0) / std::sin(1.0)).epsilon(1e-14));

    Deformation e(1.013);
    for (long k : {0L, 1L, 2L})
        for (double sigma : {0.0, 0.3, 1.7}) {
            std::complex<double> x(pi / e.s * (k + 0.5), sigma);
            double lhs = std::norm(qnumber_complex(x, e));
            double rhs = std::pow(std::cosh(e.s * sigma), 2) / (e.sin_s * e.sin_s);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
}

TEST_CASE("printed decomposition is only compared") {
    Deformation d(0.9);
    auto printed = qnumber_complex_printed({0.4, 0.0}, d);
    CHECK(std::abs(printed - qnumber_complex({0.4, 0.0}, d)) < 1e-14);
    auto off = qnumber_complex_printed({0.4, 0.6}, d);
    CHECK(std::isfinite(std::abs(off)));
}

TEST_CASE("hyperbolic bracket") {
    CHECK(qnumber_hyperbolic(1, 0.4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(qnumber_hyperbolic(2, std::log(2.0)) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(qnumber_hyperbolic(3.3, 1e-7) == doctest::Approx(3.3).epsilon(1e-10));
    CHECK_THROWS_AS(qnumber_hyperbolic(1, 0), DomainError);
}

TEST_CASE("bracket sequence limits") {
    Deformation near_pi(pi - 1e-9);
    auto v = bracket_sequence({-3, -1, 0, 2, 5}, near_pi);
    std::vector<double> want = {6, 2, 0, -4, -10};
    for (size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - want[i]) < 1e-5);

    Deformation half(pi / 2);
    for (double m : {-2.5, -0.5, 0.5, 1.5}) CHECK(std::abs(std::abs(qnumber(2 * m, half)) - 1) < 1e-15);
    for (double m : {-2.0, 0.0, 1.0, 3.0}) CHECK(std::abs(qnumber(2 * m, half)) < 1e-14);
}

TEST_CASE("parity, reflection, recurrence, bound") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> X(-20, 20), S(0.01, pi - 0.01);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        double x = X(rng), s = S(rng);
        Deformation d(s), r(-s);
        CHECK(qnumber(-x, d) == -qnumber(x, d));
        CHECK(qnumber(x, r) == qnumber(x, d));
        worst = std::max(worst, std::abs(qnumber(x + 1, d) + qnumber(x - 1, d) - 2 * d.cos_s * qnumber(x, d)));
        CHECK(std::abs(qnumber(x, d)) <= 1 / d.sin_s * (1 + 1e-15));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("period at roots of unity") {
    for (int k = 1; k <= 6; ++k) {
        Deformation d(pi / (k + 1));
        for (int m = -5; m <= 5; ++m)
            CHECK(std::abs(qnumber(2 * (m + k + 1), d) - qnumber(2 * m, d)) < 1e-12);
    }
}

TEST_CASE("undeformed limit is quadratic in s") {
    double worst = 0;
    for (double s : {1e-3, 5e-4, 2.5e-4})
        for (double x = -10; x <= 10; x += 0.25)
            worst = std::max(worst, std::abs(qnumber(x, Deformation(s)) - x) / (s * s));
    // (x^3 - x)/6 at |x| = 10
    CHECK(worst < 170);
}
