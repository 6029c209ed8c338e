#include "qdef/schrod.hpp"
#include "qdef/errors.hpp"
#include "qdef/repcls.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qdef {

namespace {

constexpr double NaN = std::numeric_limits<double>::quiet_NaN();

double sq(double x) { return x * x; }

// second-order differences, one-sided at the ends
std::vector<double> derivative(const std::vector<double>& v, double h) {
    size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 3) return d;
    for (size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
    d[n - 1] = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * h);
    return d;
}

// distance from r to the nearest zero of cos(kappa r + phase)
double pole_distance(double r, double kappa, double phase) {
    double u = kappa * r + phase - std::numbers::pi / 2;
    double n = std::round(u / std::numbers::pi);
    return std::abs(u - n * std::numbers::pi) / kappa;
}

// integral of f1 from 0 for the closed forms
double f1_antiderivative(F1Branch b, double kappa, int sign, double r) {
    switch (b) {
    case F1Branch::Tan: return std::log(std::abs(std::cos(kappa * r))) / (kappa * kappa);
    case F1Branch::Tanh: return -std::log(std::cosh(kappa * r)) / (kappa * kappa);
    case F1Branch::ConstantHyperbolic: return sign * r / kappa;
    case F1Branch::Linear: return -r * r / 2;
    case F1Branch::Tabulated: break;
    }
    return NaN;
}

double kappa_of(const Deformation& d) { return std::sqrt(std::abs(d.cos_s)); }

F1Branch branch_from_tag(const std::string& t) {
    return parse_f1_branch(t);
}

} // namespace

Grid Grid::span(double start, double stop, double step) {
    if (!(step > 0)) throw DomainError("grid step must be positive");
    if (!(stop >= start)) throw DomainError("grid stop must not precede start");
    Grid g;
    g.start = start;
    g.step = step;
    g.count = (long)std::floor((stop - start) / step + 1e-9) + 1;
    return g;
}

const char* to_string(F1Branch b) {
    switch (b) {
    case F1Branch::Tan: return "tan";
    case F1Branch::Tanh: return "tanh";
    case F1Branch::ConstantHyperbolic: return "constant";
    case F1Branch::Linear: return "linear";
    case F1Branch::Tabulated: return "tabulated";
    }
    return "?";
}

const char* to_string(F2Branch b) {
    switch (b) {
    case F2Branch::Sech: return "sech";
    case F2Branch::Exponential: return "exponential";
    case F2Branch::Secant: return "secant";
    case F2Branch::Constant: return "constant";
    case F2Branch::Zero: return "zero";
    case F2Branch::Tabulated: return "tabulated";
    }
    return "?";
}

F1Branch parse_f1_branch(const std::string& s) {
    for (F1Branch b : {F1Branch::Tan, F1Branch::Tanh, F1Branch::ConstantHyperbolic, F1Branch::Linear,
                       F1Branch::Tabulated})
        if (s == to_string(b)) return b;
    throw DomainError("unknown f1 branch '" + s + "'");
}

F2Branch parse_f2_branch(const std::string& s) {
    for (F2Branch b : {F2Branch::Sech, F2Branch::Exponential, F2Branch::Secant, F2Branch::Constant,
                       F2Branch::Zero, F2Branch::Tabulated})
        if (s == to_string(b)) return b;
    throw DomainError("unknown f2 branch '" + s + "'");
}

F1Branch default_f1_branch(const Deformation& d) {
    if (std::abs(d.cos_s) <= 1e-12) return F1Branch::Linear;
    return d.cos_s > 0 ? F1Branch::Tan : F1Branch::Tanh;
}

F2Branch partner_f2_branch(F1Branch b) {
    switch (b) {
    case F1Branch::Tan: return F2Branch::Secant;
    case F1Branch::Tanh: return F2Branch::Sech;
    case F1Branch::ConstantHyperbolic: return F2Branch::Exponential;
    case F1Branch::Linear: return F2Branch::Constant;
    case F1Branch::Tabulated: return F2Branch::Zero;
    }
    return F2Branch::Zero;
}

Profile solve_f1(const Deformation& d, F1Branch branch, const Grid& grid, int sign, int pole_steps) {
    double c = d.cos_s;
    bool flat = std::abs(c) <= 1e-12;
    auto mismatch = [&](const char* need) {
        std::ostringstream msg;
        msg << "f1 branch " << to_string(branch) << " needs " << need << ", got cos s = " << c;
        throw BranchMismatch(msg.str());
    };
    switch (branch) {
    case F1Branch::Tan: if (flat || c < 0) mismatch("cos s > 0"); break;
    case F1Branch::Tanh:
    case F1Branch::ConstantHyperbolic: if (flat || c > 0) mismatch("cos s < 0"); break;
    case F1Branch::Linear: if (!flat) mismatch("|cos s| <= 1e-12"); break;
    case F1Branch::Tabulated: throw BranchMismatch("tabulated f1 has no closed form; use tabulated_profile");
    }
    if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
    double k = kappa_of(d);
    Profile p;
    p.grid = grid;
    p.tag = to_string(branch);
    p.v.resize(grid.count);
    p.dv.resize(grid.count);
    p.d2v.resize(grid.count);
    p.mask.assign(grid.count, false);
    for (long i = 0; i < grid.count; ++i) {
        double r = grid.at(i);
        double v = 0, dv = 0, d2v = 0;
        switch (branch) {
        case F1Branch::Tan: {
            if (pole_distance(r, k, 0.0) <= pole_steps * grid.step * (1 + 1e-9)) {
                p.mask[i] = true;
                v = dv = d2v = NaN;
                break;
            }
            double t = std::tan(k * r), cs = std::cos(k * r);
            double sec2 = 1 / (cs * cs);
            v = -t / k;
            dv = -sec2;
            d2v = -2 * k * sec2 * t;
            break;
        }
        case F1Branch::Tanh: {
            double t = std::tanh(k * r), ch = std::cosh(k * r);
            double sech2 = 1 / (ch * ch);
            v = -t / k;
            dv = -sech2;
            d2v = 2 * k * sech2 * t;
            break;
        }
        case F1Branch::ConstantHyperbolic: v = sign / k; break;
        case F1Branch::Linear: v = -r; dv = -1; break;
        case F1Branch::Tabulated: break;
        }
        p.v[i] = v;
        p.dv[i] = dv;
        p.d2v[i] = d2v;
    }
    if (branch == F1Branch::ConstantHyperbolic && sign < 0) p.tag = "constant-";
    return p;
}

Profile solve_f2(const Deformation& d, const Profile& f1, F2Branch branch, const RealizationConstants& kc,
                 int pole_steps) {
    const Grid& grid = f1.grid;
    auto need = [&](bool ok, const char* what) {
        if (!ok) {
            std::ostringstream msg;
            msg << "f2 branch " << to_string(branch) << " pairs with " << what << ", f1 is " << f1.tag;
            throw BranchMismatch(msg.str());
        }
    };
    int sign = f1.tag == "constant-" ? -1 : 1;
    switch (branch) {
    case F2Branch::Sech: need(f1.tag == "tanh", "the tanh f1 branch"); break;
    case F2Branch::Exponential: need(f1.tag.rfind("constant", 0) == 0, "the constant f1 branch"); break;
    case F2Branch::Secant: need(f1.tag == "tan", "the tan f1 branch"); break;
    case F2Branch::Constant: need(f1.tag == "linear", "the linear f1 branch"); break;
    case F2Branch::Zero: break;
    case F2Branch::Tabulated: throw BranchMismatch("tabulated f2 has no closed form; use tabulated_profile");
    }
    double k = kappa_of(d);
    Profile p;
    p.grid = grid;
    p.tag = to_string(branch);
    p.v.resize(grid.count);
    p.dv.resize(grid.count);
    p.d2v.resize(grid.count);
    p.mask = f1.mask;
    for (long i = 0; i < grid.count; ++i) {
        double r = grid.at(i);
        double v = 0, dv = 0, d2v = 0;
        switch (branch) {
        case F2Branch::Sech: {
            double u = k * r + kc.d1;
            double sech = 1 / std::cosh(u), t = std::tanh(u);
            v = kc.F1 * sech;
            dv = -kc.F1 * k * sech * t;
            d2v = kc.F1 * k * k * sech * (t * t - sech * sech);
            break;
        }
        case F2Branch::Exponential: {
            v = kc.F2 * std::exp(sign * k * r);
            dv = sign * k * v;
            d2v = k * k * v;
            break;
        }
        case F2Branch::Secant: {
            // one integration constant per inter-pole cell, chosen so f2 repeats with the cell
            double u = k * r + kc.d2;
            if (pole_distance(r, k, kc.d2) <= pole_steps * grid.step * (1 + 1e-9)) {
                p.mask[i] = true;
                v = dv = d2v = NaN;
                break;
            }
            double cs = std::abs(std::cos(u)), t = std::tan(u);
            v = kc.F3 / cs;
            dv = k * t * v;
            d2v = k * k * v * (1 / (cs * cs) + t * t);
            break;
        }
        case F2Branch::Constant: v = kc.F4; break;
        case F2Branch::Zero:
        case F2Branch::Tabulated: break;
        }
        if (p.mask[i] && branch != F2Branch::Secant) v = dv = d2v = NaN;
        p.v[i] = v;
        p.dv[i] = dv;
        p.d2v[i] = d2v;
    }
    return p;
}

Profile tabulated_profile(const Grid& grid, std::vector<double> values, const std::string& tag) {
    if ((long)values.size() != grid.count) throw DomainError("tabulated profile size does not match the grid");
    Profile p;
    p.grid = grid;
    p.tag = tag;
    p.v = std::move(values);
    p.dv = derivative(p.v, grid.step);
    p.d2v = derivative(p.dv, grid.step);
    p.mask.assign(grid.count, false);
    for (long i = 0; i < grid.count; ++i)
        if (!std::isfinite(p.v[i])) p.mask[i] = true;
    return p;
}

double f1_ode_residual(const Deformation& d, const Profile& f1) {
    double r = 0;
    for (size_t i = 0; i < f1.v.size(); ++i) {
        if (f1.mask[i]) continue;
        double res = f1.dv[i] + 1 + d.cos_s * f1.v[i] * f1.v[i];
        r = std::max(r, std::abs(res) / std::max(1.0, std::abs(f1.dv[i])));
    }
    return r;
}

double f2_ode_residual(const Deformation& d, const Profile& f1, const Profile& f2) {
    double r = 0;
    for (size_t i = 0; i < f2.v.size(); ++i) {
        if (f1.mask[i] || f2.mask[i]) continue;
        double res = f2.dv[i] + d.cos_s * f1.v[i] * f2.v[i];
        r = std::max(r, std::abs(res) / std::max(1.0, std::abs(f2.dv[i])));
    }
    return r;
}

double coupling_strength(const Deformation& d, double m) {
    return std::abs(d.eta_sq * qnumber(2 * m, d));
}

RealizationFns make_realization(const Deformation& d, double m, const Grid& grid, F1Branch b1, F2Branch b2,
                                const RealizationConstants& k) {
    Profile f1 = solve_f1(d, b1, grid, k.sign);
    Profile f2 = solve_f2(d, f1, b2, k);
    return RealizationFns{d, m, b1, b2, k, std::move(f1), std::move(f2)};
}

Profile liouville_factor(const Profile& f1, double kappa, LiouvilleMode mode) {
    const Grid& g = f1.grid;
    double w = mode == LiouvilleMode::Literal ? 1.0 : kappa / 2;
    Profile a;
    a.grid = g;
    a.tag = mode == LiouvilleMode::Literal ? "literal" : "first-derivative-elimination";
    a.mask = f1.mask;
    a.v.assign(g.count, NaN);
    a.dv.assign(g.count, NaN);
    a.d2v.assign(g.count, NaN);

    // reference sample: the centre, or the nearest unmasked one
    long c0 = g.center();
    for (long off = 0; off < g.count; ++off) {
        if (c0 + off < g.count && !f1.mask[c0 + off]) { c0 += off; break; }
        if (c0 - off >= 0 && !f1.mask[c0 - off]) { c0 -= off; break; }
    }

    std::vector<double> F(g.count, NaN);
    bool closed = f1.tag != "tabulated" && f1.tag.rfind("user", 0) != 0 && f1.tag.rfind("disjoint", 0) != 0;
    if (closed) {
        F1Branch b = f1.tag.rfind("constant", 0) == 0 ? F1Branch::ConstantHyperbolic : branch_from_tag(f1.tag);
        int sign = f1.tag == "constant-" ? -1 : 1;
        // kappa of the branch recovered from the profile itself
        double kb = 1.0;
        if (b == F1Branch::ConstantHyperbolic) kb = std::abs(1 / f1.v[c0]);
        else if (b != F1Branch::Linear) kb = std::sqrt(std::abs(-1 - f1.dv[c0]) / std::max(1e-300, f1.v[c0] * f1.v[c0]));
        if (b == F1Branch::Tan || b == F1Branch::Tanh) {
            // kappa from f1'(0) = -1 is degenerate at r = 0; use the slope relation away from it
            long probe = -1;
            for (long i = 0; i < g.count; ++i)
                if (!f1.mask[i] && std::abs(f1.v[i]) > 1e-3) { probe = i; break; }
            if (probe >= 0) kb = std::sqrt(std::abs(-1 - f1.dv[probe]) / (f1.v[probe] * f1.v[probe]));
        }
        for (long i = 0; i < g.count; ++i)
            if (!f1.mask[i]) F[i] = f1_antiderivative(b, kb, sign, g.at(i));
    } else {
        // cumulative trapezoid from the reference sample; masked samples break the chain
        F[c0] = 0;
        for (long i = c0 + 1; i < g.count; ++i)
            F[i] = (f1.mask[i] || f1.mask[i - 1]) ? NaN : F[i - 1] + g.step * (f1.v[i] + f1.v[i - 1]) / 2;
        for (long i = c0 - 1; i >= 0; --i)
            F[i] = (f1.mask[i] || f1.mask[i + 1]) ? NaN : F[i + 1] - g.step * (f1.v[i] + f1.v[i + 1]) / 2;
    }
    double Fc = F[c0];
    for (long i = 0; i < g.count; ++i) {
        if (f1.mask[i] || std::isnan(F[i])) continue;
        double av = std::exp(-w * (F[i] - Fc));
        a.v[i] = av;
        a.dv[i] = -w * f1.v[i] * av;
        a.d2v[i] = av * (w * w * f1.v[i] * f1.v[i] - w * f1.dv[i]);
    }
    return a;
}

const char* to_string(Regime r) {
    switch (r) {
    case Regime::Auto: return "auto";
    case Regime::Near0: return "near0";
    case Regime::NearPi: return "nearPi";
    case Regime::NearHalfPi: return "nearHalfPi";
    }
    return "?";
}

Regime parse_regime(const std::string& s) {
    for (Regime r : {Regime::Auto, Regime::Near0, Regime::NearPi, Regime::NearHalfPi})
        if (s == to_string(r)) return r;
    throw DomainError("unknown regime '" + s + "'");
}

RadialOperator radial_casimir(const RealizationFns& fns) {
    const Deformation& d = fns.d;
    double m = fns.m;
    long n = fns.f1.grid.count;
    double q2m = qnumber(2 * m, d), q2m2 = qnumber(2 * m - 2, d), q2m1 = qnumber(2 * m - 1, d);
    double half = sq(qnumber(m - 0.5, d));
    RadialOperator op;
    op.kappa = std::cos((2 * m - 1) * d.s);
    op.p.assign(n, NaN);
    op.dp.assign(n, NaN);
    op.q.assign(n, NaN);
    for (long i = 0; i < n; ++i) {
        if (fns.f1.mask[i] || fns.f2.mask[i]) continue;
        double f1 = fns.f1.v[i], f1p = fns.f1.dv[i], f2 = fns.f2.v[i], f2p = fns.f2.dv[i];
        op.p[i] = -op.kappa * f1;
        op.dp[i] = -op.kappa * f1p;
        op.q[i] = q2m * q2m2 * f1 * f1 / 4 - d.cos_s * q2m1 * f1 * f2 - f1p / 2 * q2m + f2 * f2 + f2p + half;
    }
    return op;
}

PotentialProfile build_potential(const RealizationFns& fns, Regime regime, const PotentialOptions& opt) {
    const Deformation& d = fns.d;
    double m = fns.m;
    Regime used = regime;
    if (used == Regime::Auto) used = d.cos_s > 0.1 ? Regime::Near0 : d.cos_s < -0.1 ? Regime::NearPi : Regime::NearHalfPi;
    bool ok = true;
    switch (used) {
    case Regime::Near0: ok = fns.f1_branch == F1Branch::Tan || fns.f1_branch == F1Branch::Tabulated; break;
    case Regime::NearPi:
        ok = fns.f1_branch == F1Branch::Tanh || fns.f1_branch == F1Branch::ConstantHyperbolic ||
             fns.f1_branch == F1Branch::Tabulated;
        break;
    case Regime::NearHalfPi: ok = fns.f1_branch != F1Branch::ConstantHyperbolic || d.cos_s < 0; break;
    case Regime::Auto: break;
    }
    if (!ok)
        throw BranchMismatch(std::string("f1 branch ") + to_string(fns.f1_branch) + " is not used in regime " +
                             to_string(used));

    const Grid& g = fns.f1.grid;
    long n = g.count;
    PotentialProfile p;
    p.grid = g;
    p.params.s = d.s;
    p.params.m = m;
    p.params.f1 = fns.f1_branch;
    p.params.f2 = fns.f2_branch;
    p.params.k = fns.k;
    p.params.regime = regime;
    p.params.opt = opt;
    p.params.grid = g;
    p.coupling = coupling_strength(d, m);
    p.decoupled = p.coupling < opt.decoupling_threshold;
    p.pole_mask.assign(n, false);
    p.values.assign(n, NaN);

    double q2m = qnumber(2 * m, d), q2m2 = qnumber(2 * m - 2, d), q2m1 = qnumber(2 * m - 1, d);
    double half = sq(qnumber(m - 0.5, d)), whole = sq(qnumber(m, d));
    std::vector<std::string> names;
    if (opt.assembly == Assembly::Derived)
        names = {"transform", "f1sq", "f1f2", opt.f1_second ? "f1second" : "f1prime", "f2", "const"};
    else
        names = {"transform", "f1sq", "f1f2", "f1second", "f2", "const"};
    for (auto& nm : names) p.terms[nm].assign(n, NaN);

    RadialOperator op = radial_casimir(fns);
    p.kappa = op.kappa;
    for (long i = 0; i < n; ++i) {
        if (fns.f1.mask[i] || fns.f2.mask[i]) {
            p.pole_mask[i] = true;
            continue;
        }
        double f1 = fns.f1.v[i], f1p = fns.f1.dv[i], f1pp = fns.f1.d2v[i], f2 = fns.f2.v[i], f2p = fns.f2.dv[i];
        double t[6];
        if (opt.assembly == Assembly::Derived) {
            t[0] = op.p[i] * op.p[i] / 4 - op.dp[i] / 2;
            t[1] = q2m * q2m2 * f1 * f1 / 4;
            t[2] = -d.cos_s * q2m1 * f1 * f2;
            t[3] = -(opt.f1_second ? f1pp : f1p) / 2 * q2m;
            t[4] = f2 * f2 + f2p;
            t[5] = half;
        } else {
            // a = exp(-int f1): a'/a = -f1, a''/a = f1^2 - f1'
            t[0] = -(f1 * f1 - f1p);
            t[1] = q2m * q2m2 * f1 * f1 / 4;
            t[2] = -f1 * f2 * q2m1;
            t[3] = -f1pp / 2 * q2m;
            t[4] = f2 * f2 + f2p;
            t[5] = whole + half;
        }
        double v = 0;
        for (int j = 0; j < 6; ++j) {
            p.terms[names[j]][i] = t[j];
            v += t[j];
        }
        p.values[i] = v;
    }
    return p;
}

PotentialProfile build_potential(const PotentialParams& pp) {
    Deformation d(pp.s);
    RealizationFns fns = make_realization(d, pp.m, pp.grid, pp.f1, pp.f2, pp.k);
    return build_potential(fns, pp.regime, pp.opt);
}

PotentialProfile potential_from_values(const Grid& grid, std::vector<double> values) {
    if ((long)values.size() != grid.count) throw DomainError("potential size does not match the grid");
    PotentialProfile p;
    p.grid = grid;
    p.params.grid = grid;
    p.pole_mask.assign(grid.count, false);
    for (long i = 0; i < grid.count; ++i)
        if (!std::isfinite(values[i])) p.pole_mask[i] = true;
    p.values = std::move(values);
    return p;
}

double transform_first_derivative_residual(const RealizationFns& fns) {
    RadialOperator op = radial_casimir(fns);
    Profile a = liouville_factor(fns.f1, op.kappa, LiouvilleMode::FirstDerivativeElimination);
    const Grid& g = a.grid;
    double h = g.step, worst = 0;
    for (long i = 2; i + 2 < g.count; ++i) {
        bool ok = true;
        for (long j = i - 2; j <= i + 2; ++j) ok = ok && !a.mask[j] && std::isfinite(a.v[j]) && !std::isnan(op.p[j]);
        // stay three samples clear of masked regions
        for (long j = std::max(0L, i - 5); j <= std::min(g.count - 1, i + 5); ++j) ok = ok && !a.mask[j];
        if (!ok) continue;
        auto L = [&](long j) { return std::log(a.v[j]); };
        double dl = (L(i - 2) - 8 * L(i - 1) + 8 * L(i + 1) - L(i + 2)) / (12 * h);
        // transformed operator: first-derivative coefficient -2 a'/a + p
        worst = std::max(worst, std::abs(-2 * dl + op.p[i]));
    }
    return worst;
}

std::vector<std::pair<long, long>> unmasked_runs(const std::vector<bool>& mask) {
    std::vector<std::pair<long, long>> runs;
    long n = (long)mask.size(), i = 0;
    while (i < n) {
        while (i < n && mask[i]) ++i;
        if (i >= n) break;
        long j = i;
        while (j + 1 < n && !mask[j + 1]) ++j;
        runs.emplace_back(i, j);
        i = j + 1;
    }
    return runs;
}

double casimir_residual(const std::vector<double>& psi, const PotentialProfile& p, long first, double c) {
    double h = p.grid.step;
    long n = (long)psi.size();
    double num = 0, den = 0;
    for (long j = 0; j < n; ++j) den += psi[j] * psi[j];
    for (long j = 2; j + 2 < n; ++j) {
        double d4 = (-psi[j - 2] + 16 * psi[j - 1] - 30 * psi[j] + 16 * psi[j + 1] - psi[j + 2]) / (12 * h * h);
        double r = -d4 + (p.values[first + j] - c) * psi[j];
        num += r * r;
    }
    if (den == 0) return 0.0;
    return std::sqrt(num / den);
}

EigenResult eigensolve_segment(const PotentialProfile& p, long first, long last, int n_states) {
    long n = last - first - 1;  // interior unknowns
    if (last - first + 1 < 200) {
        std::ostringstream msg;
        msg << "eigensolve needs at least 200 contiguous unmasked samples, got " << (last - first + 1);
        throw InsufficientGrid(msg.str());
    }
    if (n_states < 1) throw DomainError("n_states must be positive");
    if (n_states > n) n_states = (int)n;
    double h = p.grid.step;
    std::vector<double> diag(n), off(std::max(1L, n - 1));
    for (long j = 0; j < n; ++j) {
        double v = p.values[first + 1 + j];
        if (!std::isfinite(v)) throw NumericalFailure("non-finite potential inside the eigensolve segment");
        diag[j] = 2 / (h * h) + v;
    }
    for (long j = 0; j + 1 < n; ++j) off[j] = -1 / (h * h);

    lapack_int m_found = 0;
    std::vector<double> w(n), z((size_t)n * n_states);
    std::vector<lapack_int> isuppz(2 * (size_t)n_states);
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', (lapack_int)n, diag.data(), off.data(), 0.0, 0.0,
                                     1, n_states, 0.0, &m_found, w.data(), z.data(), (lapack_int)n, isuppz.data());
    if (info != 0 || m_found != n_states) {
        std::ostringstream msg;
        msg << "dstevr failed (info " << info << ", " << m_found << " of " << n_states << " found)";
        throw NumericalFailure(msg.str());
    }

    EigenResult r;
    r.h = h;
    r.first = first;
    r.last = last;
    r.r_first = p.grid.at(first);
    double scale = 1 / std::sqrt(h);
    for (int k = 0; k < n_states; ++k) {
        std::vector<double> psi(last - first + 1, 0.0);
        double big = 0;
        for (long j = 0; j < n; ++j) big = std::max(big, std::abs(z[(size_t)k * n + j]));
        double sgn = 1;
        for (long j = 0; j < n; ++j) {
            double zj = z[(size_t)k * n + j];
            if (std::abs(zj) > 1e-3 * big) { sgn = zj < 0 ? -1 : 1; break; }
        }
        for (long j = 0; j < n; ++j) psi[j + 1] = sgn * scale * z[(size_t)k * n + j];
        r.eigenvalues.push_back(w[k]);
        r.self_residual.push_back(casimir_residual(psi, p, first, w[k]));
        r.eigenvectors.push_back(std::move(psi));
    }
    return r;
}

EigenResult eigensolve(const PotentialProfile& p, int n_states) {
    auto runs = unmasked_runs(p.pole_mask);
    if (runs.size() != 1) {
        std::ostringstream msg;
        msg << "eigensolve needs one unmasked run, found " << runs.size() << "; use eigensolve_cells";
        throw InsufficientGrid(msg.str());
    }
    return eigensolve_segment(p, runs[0].first, runs[0].second, n_states);
}

std::vector<EigenResult> eigensolve_cells(const PotentialProfile& p, int n_states, long min_samples) {
    std::vector<EigenResult> out;
    for (auto [a, b] : unmasked_runs(p.pole_mask))
        if (b - a + 1 >= std::max(min_samples, 200L)) out.push_back(eigensolve_segment(p, a, b, n_states));
    if (out.empty()) throw InsufficientGrid("no unmasked run is long enough to eigensolve");
    return out;
}

LadderResult ladder_apply(const std::vector<double>& psi, long first, const RealizationFns& fns, int direction,
                          double c) {
    if (direction != 1 && direction != -1) throw DomainError("direction must be +1 or -1");
    const Deformation& d = fns.d;
    double m = fns.m, m2 = m + direction;
    const Grid& g = fns.f1.grid;
    long n = (long)psi.size();
    if (first < 0 || first + n > g.count) throw DomainError("psi does not fit on the realization grid");

    Profile a1 = liouville_factor(fns.f1, std::cos((2 * m - 1) * d.s), LiouvilleMode::FirstDerivativeElimination);
    Profile a2 = liouville_factor(fns.f1, std::cos((2 * m2 - 1) * d.s), LiouvilleMode::FirstDerivativeElimination);
    double q2m = qnumber(2 * m, d);

    std::vector<double> R(n);
    for (long j = 0; j < n; ++j) {
        long i = first + j;
        R[j] = fns.f1.mask[i] ? 0.0 : a1.v[i] * psi[j];
    }
    std::vector<double> dR = derivative(R, g.step);

    LadderResult out;
    out.psi.assign(n, 0.0);
    double nin = 0, nout = 0;
    for (long j = 0; j < n; ++j) {
        long i = first + j;
        nin += psi[j] * psi[j];
        if (fns.f1.mask[i] || fns.f2.mask[i]) continue;
        double w = -fns.f1.v[i] / 2 * q2m + fns.f2.v[i];
        out.psi[j] = (direction * dR[j] + w * R[j]) / a2.v[i];
        nout += out.psi[j] * out.psi[j];
    }
    out.norm_ratio = nin > 0 ? std::sqrt(nout / nin) : 0.0;
    out.leaves_unitary = !unitary_ok(d, c, m2);
    return out;
}

CoupledResult coupled_solve(const Deformation& d, double m, const Profile& f1, const Profile& f2) {
    if (rational_multiple_of_pi(d.s).found)
        throw DomainError("coupled_solve needs s/pi irrational (q not a root of unity)");
    double q2m = qnumber(2 * m, d);
    if (std::abs(q2m) < 1e-12) throw DomainError("coupled_solve needs [2m] != 0");
    const Grid& g = f1.grid;
    long n = g.count;
    double q2 = qnumber(2, d), mm = sq(qnumber(m, d)), e2m = d.eta_sq * q2m;

    std::vector<double> A(n, NaN), Ealt(n, NaN);
    for (long i = 0; i < n; ++i) {
        if (f1.mask[i] || f2.mask[i]) continue;
        double ratio = f2.dv[i] == 0.0 ? 0.0 : f2.dv[i] / f1.v[i];
        A[i] = q2 / 2 * mm * f1.v[i] - q2 * (2 / e2m + mm / q2m) * f2.v[i] - 4 / e2m * ratio;
        Ealt[i] = q2 / 2 * e2m * mm * f1.v[i] - q2 * f2.v[i] * (2 + d.eta_sq * mm) - 4 * ratio;
    }
    std::vector<double> dA(n, NaN);
    for (long i = 1; i + 1 < n; ++i)
        if (!std::isnan(A[i - 1]) && !std::isnan(A[i + 1])) dA[i] = (A[i + 1] - A[i - 1]) / (2 * g.step);

    // ln R by trapezoid from the centre; R itself is only formed at the end
    long c0 = g.center();
    if (std::isnan(A[c0])) throw DomainError("coupled_solve needs an unmasked grid centre");
    std::vector<double> L(n, NaN);
    L[c0] = 0;
    for (long i = c0 + 1; i < n && !std::isnan(A[i]); ++i) L[i] = L[i - 1] + g.step * (A[i] + A[i - 1]) / 2;
    for (long i = c0 - 1; i >= 0 && !std::isnan(A[i]); --i) L[i] = L[i + 1] - g.step * (A[i] + A[i + 1]) / 2;

    // radial Casimir -d^2 + p d + q acting on R' = A R
    RealizationFns fns{d, m, F1Branch::Tabulated, F2Branch::Tabulated, {}, f1, f2};
    RadialOperator op = radial_casimir(fns);

    CoupledResult res;
    res.R.assign(n, NaN);
    res.c_of_r.assign(n, NaN);
    std::vector<double> cs;
    for (long i = 0; i < n; ++i) {
        if (std::isnan(L[i])) continue;
        res.R[i] = std::exp(L[i]);
        if (std::isnan(dA[i]) || std::isnan(op.q[i])) continue;
        double cr = -dA[i] - A[i] * A[i] + op.p[i] * A[i] + op.q[i];
        if (std::isnan(cr)) throw NumericalFailure("c(r) is NaN");
        res.c_of_r[i] = cr;
        cs.push_back(cr);
    }
    if (cs.empty()) throw InsufficientGrid("coupled_solve found no interior samples");
    std::vector<double> sorted = cs;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    res.c_estimate = sorted[sorted.size() / 2];
    for (double v : cs) res.residual = std::max(res.residual, std::abs(v - res.c_estimate));
    res.success = res.residual < 1e-4 * (1 + std::abs(res.c_estimate));
    if (std::abs(A[c0]) > 1e-14) res.alt_exponent_factor = Ealt[c0] / A[c0];
    return res;
}

std::pair<Profile, Profile> disjoint_support_pair(const Grid& grid, const std::map<long, double>& I1,
                                                  const std::map<long, double>& I2, double eps) {
    if (!(eps > 0 && eps < 1)) throw DomainError("eps must lie in (0, 1)");
    for (auto [k, v] : I1) {
        auto it = I2.find(k);
        if (it != I2.end() && v != 0.0 && it->second != 0.0) {
            std::ostringstream msg;
            msg << "cell " << k << " carries both profiles";
            throw DomainError(msg.str());
        }
    }
    auto make = [&](const std::map<long, double>& I, const char* tag) {
        Profile p;
        p.grid = grid;
        p.tag = tag;
        p.v.assign(grid.count, 0.0);
        p.dv.assign(grid.count, 0.0);
        p.d2v.assign(grid.count, 0.0);
        p.mask.assign(grid.count, false);
        for (long i = 0; i < grid.count; ++i) {
            double r = grid.at(i);
            long k = (long)std::floor(r);
            double u = r - k;
            if (u <= eps || u >= 1 - eps) continue;
            auto it = I.find(k);
            if (it != I.end()) p.v[i] = it->second;
        }
        return p;
    };
    return {make(I1, "disjoint-f1"), make(I2, "disjoint-f2")};
}

double secondary_autocorrelation(const std::vector<double>& v, const std::vector<bool>& exclude, long min_lag,
                                 long max_lag) {
    long n = (long)v.size();
    double best = -1;
    for (long lag = std::max(1L, min_lag); lag <= max_lag && lag < n; ++lag) {
        double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
        long cnt = 0;
        for (long i = 0; i + lag < n; ++i) {
            if (exclude[i] || exclude[i + lag]) continue;
            double x = v[i], y = v[i + lag];
            sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
            ++cnt;
        }
        if (cnt < 3) continue;
        double vx = sxx - sx * sx / cnt, vy = syy - sy * sy / cnt;
        if (vx <= 0 || vy <= 0) continue;
        best = std::max(best, (sxy - sx * sy / cnt) / std::sqrt(vx * vy));
    }
    return best;
}

std::vector<double> richardson_ratios(const std::function<PotentialProfile(double)>& build, double h, int n) {
    EigenResult e1 = eigensolve(build(h), n), e2 = eigensolve(build(h / 2), n), e4 = eigensolve(build(h / 4), n);
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        double den = e2.eigenvalues[k] - e4.eigenvalues[k];
        out.push_back(den == 0 ? NaN : (e1.eigenvalues[k] - e2.eigenvalues[k]) / den);
    }
    return out;
}

} // namespace qdef
