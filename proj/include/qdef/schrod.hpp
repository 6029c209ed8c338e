#pragma once
#include "qdef/qnum.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qdef {

struct Grid {
    double start = 0.0;
    double step = 0.01;
    long count = 0;

    double at(long i) const { return start + i * step; }
    long center() const { return count / 2; }
    // start, start + step, ... while <= stop (1e-9 step slack)
    static Grid span(double start, double stop, double step);
};

enum class F1Branch { Tan, Tanh, ConstantHyperbolic, Linear, Tabulated };
enum class F2Branch { Sech, Exponential, Secant, Constant, Zero, Tabulated };

const char* to_string(F1Branch b);
const char* to_string(F2Branch b);
F1Branch parse_f1_branch(const std::string& s);
F2Branch parse_f2_branch(const std::string& s);

// compatible branches for this s: tan for cos s > 0, tanh/constant for cos s < 0,
// linear for |cos s| <= 1e-12
F1Branch default_f1_branch(const Deformation& d);
F2Branch partner_f2_branch(F1Branch b);

struct RealizationConstants {
    double d1 = 0.0, d2 = 0.0;
    double F1 = 1.0, F2 = 1.0, F3 = 1.0, F4 = 1.0;
    int sign = 1;  // f1 = sign/sqrt(-cos s) on the constant branch, f2 ~ exp(sign kappa r)
};

// a grid function with its first two derivatives and a mask of excluded samples
struct Profile {
    Grid grid;
    std::vector<double> v, dv, d2v;
    std::vector<bool> mask;
    std::string tag;
};

Profile solve_f1(const Deformation& d, F1Branch branch, const Grid& grid, int sign = 1,
                 int pole_steps = 2);

Profile solve_f2(const Deformation& d, const Profile& f1, F2Branch branch,
                 const RealizationConstants& k, int pole_steps = 2);

// user-supplied values on the grid; derivatives by second-order differences
Profile tabulated_profile(const Grid& grid, std::vector<double> values, const std::string& tag);

// max over unmasked samples of |f1' + 1 + cos s f1^2| / max(1, |f1'|)
double f1_ode_residual(const Deformation& d, const Profile& f1);
// max over unmasked samples of |f2' + cos s f1 f2| / max(1, |f2'|)
double f2_ode_residual(const Deformation& d, const Profile& f1, const Profile& f2);

// |eta^2 [2m]|, the size of the coupling dropped in the decoupled regime
double coupling_strength(const Deformation& d, double m);

struct RealizationFns {
    Deformation d;
    double m;
    F1Branch f1_branch;
    F2Branch f2_branch;
    RealizationConstants k;
    Profile f1, f2;
};

RealizationFns make_realization(const Deformation& d, double m, const Grid& grid, F1Branch b1,
                                F2Branch b2, const RealizationConstants& k = {});

enum class LiouvilleMode { FirstDerivativeElimination, Literal };

// first-derivative elimination: 2a' + kappa f1 a = 0; literal: a = exp(-int f1)
// both normalized to 1 at the grid centre (or the nearest unmasked sample)
Profile liouville_factor(const Profile& f1, double kappa, LiouvilleMode mode);

enum class Regime { Auto, Near0, NearPi, NearHalfPi };
const char* to_string(Regime r);
Regime parse_regime(const std::string& s);

enum class Assembly {
    Derived,  // radial Casimir from the realization, first-derivative term eliminated
    Printed   // the printed term list: literal a, f1'' term, [m]^2 + [m-1/2]^2
};

struct PotentialOptions {
    Assembly assembly = Assembly::Derived;
    bool f1_second = false;     // Derived only: use -(f1''/2)[2m] in place of -(f1'/2)[2m]
    double decoupling_threshold = 0.05;
};

struct PotentialParams {
    double s = 0, m = 0;
    F1Branch f1 = F1Branch::Tan;
    F2Branch f2 = F2Branch::Secant;
    RealizationConstants k;
    Regime regime = Regime::Auto;
    PotentialOptions opt;
    Grid grid;
};

struct PotentialProfile {
    Grid grid;
    std::vector<double> values;
    std::vector<bool> pole_mask;
    PotentialParams params;
    std::map<std::string, std::vector<double>> terms;
    double kappa = 0;     // first-derivative coefficient is -kappa f1
    double coupling = 0;  // |eta^2 [2m]|
    bool decoupled = false;
};

// the radial operator -d^2 + p d + q of the Casimir on the m sector
struct RadialOperator {
    std::vector<double> p, dp, q;
    double kappa;
};

RadialOperator radial_casimir(const RealizationFns& fns);

PotentialProfile build_potential(const RealizationFns& fns, Regime regime = Regime::Auto,
                                 const PotentialOptions& opt = {});

PotentialProfile build_potential(const PotentialParams& p);

// potential from explicit values (oracles, user input)
PotentialProfile potential_from_values(const Grid& grid, std::vector<double> values);

// max |d/dr ln a - p/2| over the unmasked interior, d/dr by fourth-order differences
double transform_first_derivative_residual(const RealizationFns& fns);

struct EigenResult {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;  // on samples first..last, zero at both ends
    double h = 0;
    long first = 0, last = 0;  // sample indices of the hard walls
    double r_first = 0;
    std::vector<double> self_residual;  // ||(-D4^2 + V) psi - c psi|| / ||psi||
    std::string boundary = "hard-wall";
    std::string matrix = "symmetric-tridiagonal";
};

// contiguous unmasked runs as [first, last] index pairs
std::vector<std::pair<long, long>> unmasked_runs(const std::vector<bool>& mask);

EigenResult eigensolve_segment(const PotentialProfile& p, long first, long last, int n_states);
// one unmasked run required
EigenResult eigensolve(const PotentialProfile& p, int n_states);
// every run with at least min_samples samples
std::vector<EigenResult> eigensolve_cells(const PotentialProfile& p, int n_states, long min_samples = 200);

// ||(-D4^2 + V - c) psi|| / ||psi|| on samples two away from the ends of [first, last]
double casimir_residual(const std::vector<double>& psi, const PotentialProfile& p, long first, double c);

struct LadderResult {
    std::vector<double> psi;  // Schrodinger form in the m +- 1 sector
    bool leaves_unitary = false;
    double norm_ratio = 0;    // ||out|| / ||in||
};

// +-R' + (-(f1/2)[2m] + f2) R with R = a_m psi, returned as R~ / a_{m+-1}
LadderResult ladder_apply(const std::vector<double>& psi, long first, const RealizationFns& fns,
                          int direction, double c);

struct CoupledResult {
    std::vector<double> R;      // on the grid, R(centre) = 1
    std::vector<double> c_of_r;
    double c_estimate = 0;      // median of c(r)
    double residual = 0;        // max |c(r) - median|
    bool success = false;
    double alt_exponent_factor = 0;     // printed exponent integrand / A
};

CoupledResult coupled_solve(const Deformation& d, double m, const Profile& f1, const Profile& f2);

// piecewise constant profiles on the cells (k + eps, k + 1 - eps), k integer
std::pair<Profile, Profile> disjoint_support_pair(const Grid& grid, const std::map<long, double>& I1,
                                                  const std::map<long, double>& I2, double eps);

// largest Pearson correlation of v(r) with v(r + lag), lag in [min_lag, max_lag] samples,
// over pairs where neither sample is excluded
double secondary_autocorrelation(const std::vector<double>& v, const std::vector<bool>& exclude,
                                 long min_lag, long max_lag);

// (e_h - e_h/2) / (e_h/2 - e_h/4) for the lowest n levels of build(h), build(h/2), build(h/4)
std::vector<double> richardson_ratios(const std::function<PotentialProfile(double)>& build, double h, int n);

} // namespace qdef
