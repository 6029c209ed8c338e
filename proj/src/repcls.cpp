#include "qdef/repcls.hpp"
#include "qdef/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qdef {

namespace {

using Interval = std::pair<double, double>;

double sq(double x) { return x * x; }

double alpha_of(const Deformation& d, double c) {
    double A = c * d.sin_s * d.sin_s;
    if (A >= 1.0) return std::numbers::pi / 2;
    return std::asin(std::sqrt(std::max(A, 0.0)));
}

// allowed intervals of the two families meeting [a, b]
std::vector<Interval> allowed_intervals(const AllowedSet& as, double a, double b) {
    std::vector<Interval> out;
    if (as.everything) {
        out.emplace_back(a, b);
        return out;
    }
    auto family = [&](double offset, double len) {
        if (len < 0) return;
        long k0 = (long)std::floor((a - offset) / as.period) - 1;
        long k1 = (long)std::ceil((b - offset) / as.period) + 1;
        for (long k = k0; k <= k1; ++k) {
            double c = offset + k * as.period;
            double lo = std::max(a, c - len / 2), hi = std::min(b, c + len / 2);
            if (lo <= hi) out.emplace_back(lo, hi);
        }
    };
    family(0.0, as.Delta);
    family(as.period / 2, as.delta);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Interval> intersect(const std::vector<Interval>& x, const std::vector<Interval>& y) {
    std::vector<Interval> out;
    for (auto& p : x)
        for (auto& q : y) {
            double lo = std::max(p.first, q.first), hi = std::min(p.second, q.second);
            if (hi > lo) out.emplace_back(lo, hi);
        }
    std::sort(out.begin(), out.end());
    return out;
}

double ladder_plus(const Deformation& d, double c, double m) {
    return std::sqrt(std::max(0.0, c - sq(qnumber(m + 0.5, d))));
}

int count_distinct(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    int n = 0;
    for (size_t i = 0; i < v.size(); ++i)
        if (i == 0 || v[i] - v[i - 1] > tol) ++n;
    return n;
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

} // namespace

Thresholds thresholds(const Deformation& d) {
    double sh = std::sin(d.s / 2), ch = std::cos(d.s / 2);
    return {1.0 / (d.sin_s * d.sin_s), 1.0 / (4 * sh * sh), 1.0 / (4 * ch * ch)};
}

bool unitary_ok(const Deformation& d, double c, double m) {
    double lhs = c * d.sin_s * d.sin_s;
    double a = std::sin(d.s * (m - 0.5)), b = std::sin(d.s * (m + 0.5));
    return lhs - a * a >= -1e-12 && lhs - b * b >= -1e-12;
}

IntervalStructure interval_structure(const Deformation& d, double c) {
    Thresholds t = thresholds(d);
    const double tol = 1e-12;
    if (c < t.c1 * (1 - tol) || c > t.c0 * (1 + tol)) {
        std::ostringstream msg;
        msg << "c = " << c << " outside [c1, c0] = [" << t.c1 << ", " << t.c0 << "]; ";
        if (c > t.c0)
            msg << "this is the continuous series (class 1)";
        else if (c >= t.c2)
            msg << "only J_Delta windows exist here (finite/discrete classes 2b, 3)";
        else
            msg << "no unitary representations below c2 = " << t.c2;
        throw DomainError(msg.str());
    }
    IntervalStructure is;
    is.alpha = alpha_of(d, std::min(c, t.c0));
    is.period = std::numbers::pi / d.s;
    is.delta = (d.s - std::numbers::pi + 2 * is.alpha) / d.s;
    is.Delta = (2 * is.alpha - d.s) / d.s;
    is.gap = (std::numbers::pi - 2 * is.alpha) / d.s;
    return is;
}

bool AllowedSet::contains(double m, double tol) const {
    if (everything) return true;
    auto near = [&](double offset, double len) {
        if (len < 0) return false;
        double k = std::round((m - offset) / period);
        return std::abs(m - offset - k * period) <= len / 2 + tol;
    };
    return near(0.0, Delta) || near(period / 2, delta);
}

AllowedSet allowed_set(const Deformation& d, double c) {
    AllowedSet as;
    // s in (pi, 2pi) etc. are folded back through |sin|
    double s = std::abs(std::remainder(d.s, 2 * std::numbers::pi));
    double a = alpha_of(d, c);
    as.period = std::numbers::pi / s;
    as.everything = c * d.sin_s * d.sin_s >= 1.0;
    as.Delta = (2 * a - s) / s;
    as.delta = (s - std::numbers::pi + 2 * a) / s;
    if (c < 0) as.Delta = as.delta = -1.0;
    return as;
}

std::vector<double> allowed_m_scan(const Deformation& d, double c, double lo, double hi, double step) {
    AllowedSet as = allowed_set(d, c);
    std::vector<double> out;
    long n = (long)std::floor((hi - lo) / step + 1e-9);
    for (long i = 0; i <= n; ++i) {
        double m = lo + i * step;
        if (as.contains(m)) out.push_back(m);
    }
    return out;
}

const char* to_string(RepClass c) {
    switch (c) {
    case RepClass::Continuous1: return "Continuous1";
    case RepClass::Mixed2a: return "Mixed2a";
    case RepClass::Finite2b: return "Finite2b";
    case RepClass::Singlet2c: return "Singlet2c";
    case RepClass::Discrete3: return "Discrete3";
    }
    return "?";
}

std::string RepDescriptor::m_rule() const {
    std::ostringstream o;
    o.precision(17);
    if (finite) {
        o << "m in {";
        for (size_t i = 0; i < m_list.size(); ++i) o << (i ? "," : "") << m_list[i];
        o << "}";
    } else if (cls == RepClass::Mixed2a) {
        o << "m = " << m0 << " + Z (period " << period << ")";
    } else {
        o << "m = " << m0 << " + Z, m != (pi/s)(k+1/2) +- 1/2";
    }
    return o.str();
}

bool is_forbidden_point(const Deformation& d, double m, double tol) {
    double P = std::numbers::pi / d.s;
    for (double sgn : {-0.5, 0.5}) {
        double x = (m - sgn) / P - 0.5;
        if (std::abs(x - std::round(x)) * std::abs(P) <= tol) return true;
    }
    return false;
}

bool descriptor_allows(const RepDescriptor& r, double m) {
    if (r.finite) {
        for (double x : r.m_list)
            if (std::abs(x - m) <= 1e-9) return true;
        return false;
    }
    double frac = m - r.m0;
    if (std::abs(frac - std::round(frac)) > 1e-9) return false;
    if (r.cls == RepClass::Continuous1) return !is_forbidden_point(Deformation(r.s), m);
    return true;
}

PiRational rational_multiple_of_pi(double s, long max_den, double tol) {
    double x = s / std::numbers::pi;
    double sign = x < 0 ? -1.0 : 1.0;
    x = std::abs(x);
    // convergents h/k
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(r);
        if (a > 1e9) break;
        long ai = (long)a;
        long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        if (std::abs(x - (double)h1 / k1) <= tol) return {true, (long)(sign * h1), k1};
        double frac = r - a;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    return {false, 0, 0};
}

double continuous_series_c(const Deformation& d, long /*k*/, double sigma) {
    double ch = std::cosh(d.s * sigma);
    return ch * ch / (d.sin_s * d.sin_s);
}

namespace {

// ladder m0 + Z staying strictly inside the allowed set, s = pi p / l
bool mixed_ladder(const Deformation& d, double c, const PiRational& pr, RepDescriptor& out) {
    AllowedSet as = allowed_set(d, c);
    long l = std::abs(pr.l);
    std::vector<Interval> feas{{0.0, 1.0}};
    for (long j = 0; j < l && !feas.empty(); ++j) {
        auto iv = allowed_intervals(as, (double)j, (double)j + 1.0);
        for (auto& p : iv) { p.first -= j; p.second -= j; }
        feas = intersect(feas, iv);
    }
    std::vector<Interval> kept;
    for (auto& p : feas)
        if (p.second - p.first > 1e-9) kept.push_back(p);
    if (kept.empty()) return false;
    out.cls = RepClass::Mixed2a;
    out.c = c;
    out.s = d.s;
    out.finite = false;
    out.period = l;
    out.m0_ranges = kept;
    out.m0 = 0.5 * (kept.front().first + kept.front().second);
    std::vector<double> coeffs;
    for (long j = 0; j < l; ++j) coeffs.push_back(ladder_plus(d, c, out.m0 + j));
    out.distinct_ladder_values = count_distinct(coeffs, 1e-9);
    return true;
}

} // namespace

std::vector<RepDescriptor> classify(const Deformation& d, double c) {
    std::vector<RepDescriptor> out;
    if (!(c > 0)) return out;
    Thresholds t = thresholds(d);
    PiRational pr = rational_multiple_of_pi(d.s);
    const double tol = 1e-9;

    if (c > t.c0 * (1 + 1e-12) || (close_rel(c, t.c0, tol) && !pr.found)) {
        RepDescriptor r;
        r.cls = RepClass::Continuous1;
        r.c = c;
        r.s = d.s;
        r.strange = !pr.found;
        out.push_back(r);
        return out;
    }

    if (close_rel(c, t.c1, tol)) {
        RepDescriptor r;
        r.cls = RepClass::Singlet2c;
        r.c = c;
        r.s = d.s;
        r.finite = true;
        r.N = 0;
        r.m0 = std::numbers::pi / (2 * d.s);
        r.m_list = {r.m0};
        out.push_back(r);
    }

    if (c > t.c1 * (1 + tol) && pr.found) {
        RepDescriptor r;
        if (mixed_ladder(d, c, pr, r)) out.push_back(r);
    }

    // closed ladder of length N+1 centred in J_Delta: c = [(N+1)/2]^2, (N+1) s <= pi
    double ratio = std::sqrt(c) * std::abs(d.sin_s);
    if (ratio <= 1.0 + 1e-12) {
        double Nr = 2 * std::asin(std::min(1.0, ratio)) / std::abs(d.s) - 1;
        long N = std::lround(Nr);
        if (N >= 0 && (N + 1) * std::abs(d.s) <= std::numbers::pi * (1 + 1e-12)) {
            double cN = sq(qnumber((N + 1) / 2.0, d));
            if (close_rel(c, cN, tol)) {
                RepDescriptor r;
                r.c = c;
                r.s = d.s;
                r.finite = true;
                r.N = (int)N;
                r.cls = c >= t.c1 * (1 - tol) ? RepClass::Finite2b : RepClass::Discrete3;
                for (long i = 0; i <= N; ++i) r.m_list.push_back(-N / 2.0 + i);
                r.m0 = r.m_list.front();
                out.push_back(r);
            }
        }
    }
    return out;
}

RepDescriptor class2a_enumerate(const Deformation& d, double c, double epsilon) {
    PiRational pr = rational_multiple_of_pi(d.s);
    if (!pr.found || pr.p != 1 || pr.l < 2)
        throw DomainError("class 2a enumeration needs s = pi/(k+1) with integer k >= 1");
    long k = pr.l - 1;
    Thresholds t = thresholds(d);
    if (!(c > t.c1 && c < t.c0))
        throw DomainError("class 2a needs c1 < c < c0");
    IntervalStructure is = interval_structure(d, c);
    double eps_max = (k + 1) * 2 * is.alpha / std::numbers::pi - k;
    if (!(epsilon > 0 && epsilon < eps_max)) {
        std::ostringstream msg;
        msg << "epsilon = " << epsilon << " outside (0, " << eps_max << ")";
        throw DomainError(msg.str());
    }
    RepDescriptor r;
    r.cls = RepClass::Mixed2a;
    r.c = c;
    r.s = d.s;
    r.k = k;
    r.period = k + 1;
    r.m0 = std::numbers::pi / (2 * d.s) - is.delta / 2 + epsilon;
    std::vector<double> coeffs;
    for (long j = 0; j <= k; ++j) coeffs.push_back(ladder_plus(d, c, r.m0 + j));
    r.distinct_ladder_values = count_distinct(coeffs, 1e-9);
    for (long j = -3 * (k + 1); j <= 3 * (k + 1); ++j)
        if (!unitary_ok(d, c, r.m0 + j))
            throw NumericalFailure("class 2a ladder left the allowed set at m = " +
                                   std::to_string(r.m0 + j));
    return r;
}

} // namespace qdef
