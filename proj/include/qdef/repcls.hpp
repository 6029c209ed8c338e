#pragma once
#include "qdef/qnum.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qdef {

struct Thresholds {
    double c0;  // 1/sin^2 s
    double c1;  // 1/(4 sin^2(s/2)), also the singlet value of class 2c
    double c2;  // 1/(4 cos^2(s/2)) = [1/2]^2, lower bound of class 3
};

Thresholds thresholds(const Deformation& d);

// both ladder radicands c - [m -+ 1/2]^2 non-negative (absolute slack 1e-12 on the sin^2 scale)
bool unitary_ok(const Deformation& d, double c, double m);

struct IntervalStructure {
    double alpha;
    double delta;   // length of J_delta
    double Delta;   // length of J_Delta
    double gap;     // length of each J_f
    double period;  // pi/s

    double delta_center(long k) const { return (k + 0.5) * period; }
    double Delta_center(long k) const { return k * period; }
};

// valid for c1 <= c <= c0 only
IntervalStructure interval_structure(const Deformation& d, double c);

// the same families without the range restriction; negative lengths mean the family is absent,
// c >= c0 collapses to the whole line
struct AllowedSet {
    double period;
    double delta;
    double Delta;
    bool everything;
    bool contains(double m, double tol = 1e-10) const;
};

AllowedSet allowed_set(const Deformation& d, double c);

// allowed labels on lo, lo+step, ..., <= hi
std::vector<double> allowed_m_scan(const Deformation& d, double c, double lo, double hi, double step);

enum class RepClass { Continuous1, Mixed2a, Finite2b, Singlet2c, Discrete3 };

const char* to_string(RepClass c);

struct RepDescriptor {
    RepClass cls = RepClass::Continuous1;
    double c = 0.0;
    double s = 0.0;
    bool finite = false;
    std::vector<double> m_list;  // finite classes and the singlet
    int N = -1;                  // dimension - 1 when finite
    long k = 0;
    double m0 = 0.0;             // anchor of an infinite ladder m0 + Z
    long period = 0;             // class 2a: ladder period l for s = pi p / l
    std::vector<std::pair<double, double>> m0_ranges;  // class 2a: feasible m0 mod 1
    int distinct_ladder_values = 0;
    bool strange = false;        // irrational s/pi above c0

    std::string m_rule() const;
};

// membership of m in the descriptor's m_rule
bool descriptor_allows(const RepDescriptor& r, double m);

std::vector<RepDescriptor> classify(const Deformation& d, double c);

double continuous_series_c(const Deformation& d, long k, double sigma);

// class 2a ladder at s = pi/(k+1), m0 = pi/(2s) - delta/2 + epsilon
RepDescriptor class2a_enumerate(const Deformation& d, double c, double epsilon);

struct PiRational {
    bool found;
    long p;
    long l;
};

// s = pi p / l by continued fractions, l <= max_den, |s/pi - p/l| <= tol
PiRational rational_multiple_of_pi(double s, long max_den = 64, double tol = 1e-9);

// forbidden labels m_f = (pi/s)(k + 1/2) +- 1/2 of the continuous series
bool is_forbidden_point(const Deformation& d, double m, double tol = 1e-9);

} // namespace qdef
