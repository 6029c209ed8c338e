#pragma once
#include "qdef/qnum.hpp"

#include <optional>
#include <vector>

namespace qdef {

enum class Connectivity { Connected, Disconnected };

const char* to_string(Connectivity c);

struct LevelSection {
    std::vector<double> jz_samples;
    std::vector<double> jx_values;  // +sqrt(radicand); NaN where masked
    std::vector<bool> mask;         // true where the radicand is negative
    Connectivity connectivity = Connectivity::Connected;
    int components = 0;
};

// Jy = 0 section of cos s sin^2(s Jz)/sin^2 s + Jx^2 + Jy^2 = c
LevelSection level_section(const Deformation& d, double c, const std::vector<double>& jz_grid);

// symmetric window of n_periods periods of pi/s with samples_per_period points per period
std::vector<double> section_window(const Deformation& d, double n_periods, int samples_per_period);

struct TopologyTransition {
    bool found = false;
    double s_lo = 0, s_hi = 0;  // bracketing grid points (Disconnected, Connected)
    double s_star = 0;
    std::vector<Connectivity> per_s;
};

TopologyTransition topology_transition(double c, const std::vector<double>& s_grid,
                                       double n_periods = 3.0, int samples_per_period = 2000);

struct Crossing {
    double s;
    double m1, m2;
    bool tangential = false;  // no sign change, only a small minimum gap
    double gap = 0;
};

struct FlowTable {
    std::vector<double> s_grid;
    std::vector<double> m_values;
    std::vector<std::vector<double>> curves;  // curves[i][j] = [2 m_i](s_j)
    std::vector<Crossing> crossings;
};

// m = 1/2, 1, ..., m_max
FlowTable spectral_flow(double m_max, const std::vector<double>& s_grid, double tol = 1e-9,
                        double tangential_gap = 1e-3);

// distinct values among [2m], m = 0..k, at s = pi/(k+1)
int distinct_bracket_values(int k, double tol = 1e-9);

} // namespace qdef
