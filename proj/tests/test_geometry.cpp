#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdef/errors.hpp"
#include "qdef/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qdef;
using std::numbers::pi;

namespace {
std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (long i = 0; lo + i * step <= hi + 1e-12; ++i) g.push_back(lo + i * step);
    return g;
}

// components of the radicand-positive set on a fine uniform grid
int brute_components(const Deformation& d, double c, double lo, double hi, long n) {
    int comp = 0;
    bool prev = true;
    for (long i = 0; i <= n; ++i) {
        double z = lo + (hi - lo) * i / n;
        double sz = std::sin(d.s * z);
        bool masked = c - d.cos_s * sz * sz / (d.sin_s * d.sin_s) < 0;
        if (!masked && prev) ++comp;
        prev = masked;
    }
    return comp;
}
} // namespace

TEST_CASE("sections by sign of cos s") {
    Deformation obtuse(2.2);
    auto a = level_section(obtuse, 0.05, section_window(obtuse, 3, 400));
    CHECK(a.connectivity == Connectivity::Connected);
    for (size_t i = 0; i < a.mask.size(); ++i) {
        CHECK_FALSE(a.mask[i]);
        CHECK(a.jx_values[i] >= std::sqrt(0.05) - 1e-15);
    }

    Deformation acute(0.6);
    double edge = acute.cos_s / (acute.sin_s * acute.sin_s);
    auto b = level_section(acute, 0.5 * edge, section_window(acute, 3, 400));
    CHECK(b.connectivity == Connectivity::Disconnected);
    CHECK(b.components >= 2);
    for (size_t i = 0; i < b.mask.size(); ++i) CHECK(b.mask[i] == std::isnan(b.jx_values[i]));

    auto c = level_section(acute, 1.1 * edge, section_window(acute, 3, 400));
    CHECK(c.connectivity == Connectivity::Connected);
    CHECK_THROWS_AS(level_section(acute, 0.0, {0.0}), DomainError);
}

TEST_CASE("connectivity agrees with a finer scan") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> S(0.05, pi - 0.05), U(0.05, 3.0);
    for (int i = 0; i < 100; ++i) {
        Deformation d(S(rng));
        double c = U(rng);
        auto w = section_window(d, 3, 400);
        auto sec = level_section(d, c, w);
        int fine = brute_components(d, c, w.front(), w.back(), 10 * (long)(w.size() - 1));
        CHECK((sec.connectivity == Connectivity::Connected) == (fine == 1));
    }
}

TEST_CASE("topology transition at c = 1") {
    auto sg = grid(0.5, 3.0, 0.001);
    auto t = topology_transition(1.0, sg);
    REQUIRE(t.found);
    double s_star = std::acos((std::sqrt(5.0) - 1) / 2);
    CHECK(s_star == doctest::Approx(0.9046).epsilon(1e-4));
    CHECK(std::abs(t.s_star - s_star) <= 0.001);
    for (size_t i = 0; i < sg.size(); ++i)
        if (std::cos(sg[i]) <= 0) CHECK(t.per_s[i] == Connectivity::Connected);

    auto none = topology_transition(1e6, grid(0.05, 3.0, 0.01));
    CHECK_FALSE(none.found);
}

TEST_CASE("spectral flow") {
    auto sg = grid(1e-4, pi - 1e-4, pi / 1200);
    auto ft = spectral_flow(4.5, sg);
    CHECK(ft.m_values.size() == 9);
    for (size_t j = 0; j < sg.size(); ++j)
        for (auto& c : ft.curves) CHECK(std::abs(c[j]) * std::sin(sg[j]) <= 1 + 1e-12);
    for (size_t i = 0; i < ft.m_values.size(); ++i) {
        CHECK(std::abs(ft.curves[i].front() - 2 * ft.m_values[i]) < 1e-4);
        double m = ft.m_values[i];
        if (m == std::floor(m)) CHECK(std::abs(ft.curves[i].back() + 2 * m) < 1e-3);
    }

    // grid contains pi/2, pi/3, pi/4 up to rounding
    for (int k : {1, 2, 3}) {
        double s0 = pi / (k + 1);
        int near = 0;
        for (auto& c : ft.crossings)
            if (std::abs(c.s - s0) < 2 * pi / 1200) ++near;
        CHECK(near > 0);
    }
    auto half = spectral_flow(4.0, {pi / 2});
    for (size_t i = 0; i < half.m_values.size(); ++i)
        if (half.m_values[i] == std::floor(half.m_values[i])) CHECK(std::abs(half.curves[i][0]) < 1e-14);
    CHECK_THROWS_AS(spectral_flow(2, {pi}), DomainError);
}

TEST_CASE("distinct bracket values at roots of unity") {
    for (int k = 1; k <= 8; ++k) {
        int n = distinct_bracket_values(k);
        CHECK(n <= k + 1);
        CHECK(n >= 1);
    }
    CHECK(distinct_bracket_values(1) == 1);
}
