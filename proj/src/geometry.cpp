#include "qdef/geometry.hpp"
#include "qdef/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qdef {

const char* to_string(Connectivity c) {
    return c == Connectivity::Connected ? "Connected" : "Disconnected";
}

LevelSection level_section(const Deformation& d, double c, const std::vector<double>& jz_grid) {
    if (!(c > 0)) throw DomainError("level section needs c > 0");
    LevelSection ls;
    ls.jz_samples = jz_grid;
    double s2 = d.sin_s * d.sin_s;
    bool prev = true;
    for (double z : jz_grid) {
        double sz = std::sin(d.s * z);
        double rad = c - d.cos_s * sz * sz / s2;
        bool masked = rad < 0;
        ls.mask.push_back(masked);
        ls.jx_values.push_back(masked ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(rad));
        if (!masked && prev) ++ls.components;
        prev = masked;
    }
    ls.connectivity = ls.components == 1 ? Connectivity::Connected : Connectivity::Disconnected;
    return ls;
}

std::vector<double> section_window(const Deformation& d, double n_periods, int samples_per_period) {
    double P = std::numbers::pi / std::abs(d.s);
    // step divides half a period so the gap centres at (k + 1/2)P are sampled exactly
    double step = P / samples_per_period;
    long half = (long)std::llround(n_periods * samples_per_period / 2);
    std::vector<double> g;
    for (long i = -half; i <= half; ++i) g.push_back(i * step);
    return g;
}

TopologyTransition topology_transition(double c, const std::vector<double>& s_grid,
                                       double n_periods, int samples_per_period) {
    TopologyTransition tt;
    for (double s : s_grid) {
        Deformation d(s);
        tt.per_s.push_back(level_section(d, c, section_window(d, n_periods, samples_per_period)).connectivity);
    }
    for (size_t i = 0; i + 1 < s_grid.size(); ++i) {
        if (tt.per_s[i] != tt.per_s[i + 1]) {
            tt.found = true;
            tt.s_lo = s_grid[i];
            tt.s_hi = s_grid[i + 1];
            tt.s_star = 0.5 * (s_grid[i] + s_grid[i + 1]);
            break;
        }
    }
    return tt;
}

FlowTable spectral_flow(double m_max, const std::vector<double>& s_grid, double tol,
                        double tangential_gap) {
    FlowTable ft;
    ft.s_grid = s_grid;
    for (double m = 0.5; m <= m_max + 1e-12; m += 0.5) ft.m_values.push_back(m);
    for (double s : s_grid) {
        double k = std::round(s / std::numbers::pi);
        if (std::abs(s - k * std::numbers::pi) < 1e-6)
            throw DomainError("spectral flow grid must stay 1e-6 away from multiples of pi");
    }
    for (double m : ft.m_values) {
        std::vector<double> c;
        for (double s : s_grid) c.push_back(qnumber(2 * m, Deformation(s)));
        ft.curves.push_back(std::move(c));
    }
    size_t nm = ft.m_values.size(), ns = s_grid.size();
    for (size_t a = 0; a < nm; ++a)
        for (size_t b = a + 1; b < nm; ++b) {
            std::vector<double> diff(ns);
            for (size_t j = 0; j < ns; ++j) diff[j] = ft.curves[a][j] - ft.curves[b][j];
            for (size_t j = 0; j < ns; ++j) {
                if (std::abs(diff[j]) <= tol) {
                    ft.crossings.push_back({s_grid[j], ft.m_values[a], ft.m_values[b], false, std::abs(diff[j])});
                    continue;
                }
                if (j + 1 < ns && std::abs(diff[j + 1]) > tol && (diff[j] > 0) != (diff[j + 1] > 0)) {
                    double t = diff[j] / (diff[j] - diff[j + 1]);
                    double s = s_grid[j] + t * (s_grid[j + 1] - s_grid[j]);
                    ft.crossings.push_back({s, ft.m_values[a], ft.m_values[b], false, 0.0});
                    continue;
                }
                if (j > 0 && j + 1 < ns) {
                    double g = std::abs(diff[j]);
                    if (g < tangential_gap && g < std::abs(diff[j - 1]) && g < std::abs(diff[j + 1]) &&
                        (diff[j - 1] > 0) == (diff[j] > 0) && (diff[j + 1] > 0) == (diff[j] > 0))
                        ft.crossings.push_back({s_grid[j], ft.m_values[a], ft.m_values[b], true, g});
                }
            }
        }
    std::sort(ft.crossings.begin(), ft.crossings.end(), [](const Crossing& x, const Crossing& y) {
        if (x.s != y.s) return x.s < y.s;
        if (x.m1 != y.m1) return x.m1 < y.m1;
        return x.m2 < y.m2;
    });
    return ft;
}

int distinct_bracket_values(int k, double tol) {
    Deformation d(std::numbers::pi / (k + 1));
    std::vector<double> v;
    for (int m = 0; m <= k; ++m) v.push_back(qnumber(2.0 * m, d));
    std::sort(v.begin(), v.end());
    int n = 0;
    for (size_t i = 0; i < v.size(); ++i)
        if (i == 0 || v[i] - v[i - 1] > tol) ++n;
    return n;
}

} // namespace qdef
