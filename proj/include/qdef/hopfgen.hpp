#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qdef {

struct BProfile {
    enum class Kind { Sech, Constant, Tabulated };
    Kind kind = Kind::Constant;
    double value = 0.0;               // Constant
    double f_lo = 1.0, f_hi = 1.0;    // Sech: f(m, q1) = sech_profile(m)
    std::vector<double> nodes, values;  // Tabulated, linear interpolation, flat outside

    static BProfile constant(double b);
    static BProfile sech(double f_lo, double f_hi);
    static BProfile tabulated(std::vector<double> m, std::vector<double> b);
    std::string name() const;
};

struct GenDeformation {
    double alpha;
    double q1;   // (alpha - 1)/alpha
    double h;    // q1 - 1/q1
    double C1;
    double C2;          // 2^{1/3}/(sqrt q1 + 1/sqrt q1)^{1/3}, the value inside the Casimir
    double C2_printed;  // 2^{1/3}/|sqrt q1 - 1/sqrt q1|^{1/3}
    BProfile b;

    GenDeformation(double alpha, BProfile b);
    double bval(double m) const;
};

double deformation_f(double m, const GenDeformation& gd, double q);

// f(m, 1) - 1 and df/dq(m, 1) - m by central differences
struct ReductionCheck {
    double f_at_one;
    double dfdq_minus_m;
};
ReductionCheck reduction_check(double m, const GenDeformation& gd, double dq = 1e-5);

struct UnitarityWindow {
    double L1 = 0, L2 = 0;   // from <J+J-> >= 0
    double l1 = 0, l2 = 0;   // from <J-J+> >= 0 with [J+,J-] = 2(f - 1/f)/h
    double l1_printed = 0, l2_printed = 0;  // printed root formula, printed C2, beta alpha_+ reading
    bool printed_real = false;
    double f_min = 0, f_max = 0;
    bool empty = true;
    double c = 0;
};

UnitarityWindow unitarity_window(double c, const GenDeformation& gd);

// smallest c with f_min < f_max, by bisection
double window_c_min(const GenDeformation& gd, double tol = 1e-13);

// the two inequalities evaluated directly at a value of f
double jpjm_expect(double f, double c, const GenDeformation& gd);
double jmjp_expect(double f, double c, const GenDeformation& gd);

double sech_profile(double m, double f_lo, double f_hi);

std::vector<double> spectrum_2jz(const GenDeformation& gd, const std::vector<double>& m_range);

struct Accumulation {
    bool found = false;
    double left = 0, right = 0;  // tail limits at m -> -inf, +inf
    double value = 0;
};

// monotone-tail detection on a spectrum ordered by m
Accumulation detect_accumulation(const std::vector<double>& values, int tail = 8, double tol = 1e-8);

struct GenRep {
    std::vector<double> basis, f, n2;  // n2[i] = |N_i|^2, coefficient of J+ from m_i to m_{i+1}
    Eigen::MatrixXd Jz, Jplus, Jminus, g, ginv, gt;
    double c = 0;
    int anchor = 0;
};

GenRep build_gen_rep(const GenDeformation& gd, int dim, double c);

struct GenRepChecks {
    double commutator = 0;      // [J+,J-] - 2(g^2 - g^-2)/h, interior
    double rescale_plus = 0;       // g^2 J+ g^-2 - q1 J+
    double rescale_minus = 0;      // g^2 J- g^-2 - q1^-1 J-
    double casimir_spread = 0;  // max - min of the Casimir diagonal, interior
    double casimir_offdiag = 0;
    double casimir_mean = 0;
};

GenRepChecks check_gen_rep(const GenDeformation& gd, const GenRep& r);

struct HopfReport {
    double coassoc_jp = 0, coassoc_jm = 0, coassoc_g = 0, coassoc_ginv = 0;
    double counit = 0;
    double antipode_left = 0, antipode_right = 0;   // S(J+-) = -q^{-+1} J+-
    double antipode_half_left = 0, antipode_half_right = 0;  // S(J+-) = -q^{-+1/2} J+-
    double antipode_g = 0;
    double homomorphism = 0;
};

HopfReport hopf_axiom_report(const GenDeformation& gd, const GenRep& r, int margin = 1);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace qdef
