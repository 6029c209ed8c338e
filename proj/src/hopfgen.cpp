#include "qdef/hopfgen.hpp"
#include "qdef/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qdef {

using Eigen::MatrixXd;

BProfile BProfile::constant(double b) {
    BProfile p;
    p.kind = Kind::Constant;
    p.value = b;
    return p;
}

BProfile BProfile::sech(double f_lo, double f_hi) {
    if (!(f_hi > f_lo && f_lo > 0)) throw DomainError("sech profile needs f_hi > f_lo > 0");
    BProfile p;
    p.kind = Kind::Sech;
    p.f_lo = f_lo;
    p.f_hi = f_hi;
    return p;
}

BProfile BProfile::tabulated(std::vector<double> m, std::vector<double> b) {
    if (m.size() != b.size() || m.empty()) throw DomainError("tabulated profile needs matching non-empty tables");
    for (size_t i = 1; i < m.size(); ++i)
        if (!(m[i] > m[i - 1])) throw DomainError("tabulated profile nodes must increase");
    BProfile p;
    p.kind = Kind::Tabulated;
    p.nodes = std::move(m);
    p.values = std::move(b);
    return p;
}

std::string BProfile::name() const {
    switch (kind) {
    case Kind::Sech: return "sech";
    case Kind::Constant: return "constant";
    case Kind::Tabulated: return "tabulated";
    }
    return "?";
}

double sech_profile(double m, double f_lo, double f_hi) {
    double ch = std::cosh(m);
    return (f_hi - f_lo) / (ch * ch) + f_lo;
}

GenDeformation::GenDeformation(double alpha_, BProfile b_) : alpha(alpha_), b(std::move(b_)) {
    if (alpha == 0.0 || !std::isfinite(alpha)) throw DomainError("alpha must be finite and non-zero");
    q1 = (alpha - 1) / alpha;
    if (!(q1 > 0) || q1 == 1.0)
        throw DomainError("q1 = (alpha-1)/alpha must be positive and != 1 for a real g");
    h = q1 - 1 / q1;
    double rq = std::sqrt(q1);
    C1 = std::pow(2.0, 4.0 / 3) / (std::pow(std::abs(h), 4.0 / 3) * std::pow(std::abs(rq - 1 / rq), 2.0 / 3));
    C2 = std::pow(2.0, 1.0 / 3) / std::pow(rq + 1 / rq, 1.0 / 3);
    C2_printed = std::pow(2.0, 1.0 / 3) / std::pow(std::abs(rq - 1 / rq), 1.0 / 3);
    if (b.kind == BProfile::Kind::Sech && b.f_lo < 1.0)
        throw DomainError("sech profile needs f_lo >= 1 so that b stays non-negative");
}

double GenDeformation::bval(double m) const {
    switch (b.kind) {
    case BProfile::Kind::Constant: {
        if (b.value < 0) throw DomainError("b must be non-negative");
        return b.value;
    }
    case BProfile::Kind::Sech:
        // chosen so that f(m, q1) equals the sech profile
        return alpha * alpha * (sech_profile(m, b.f_lo, b.f_hi) - 1.0);
    case BProfile::Kind::Tabulated: {
        const auto& x = b.nodes;
        const auto& y = b.values;
        double v;
        if (m <= x.front()) v = y.front();
        else if (m >= x.back()) v = y.back();
        else {
            size_t i = std::upper_bound(x.begin(), x.end(), m) - x.begin();
            double t = (m - x[i - 1]) / (x[i] - x[i - 1]);
            v = y[i - 1] + t * (y[i] - y[i - 1]);
        }
        if (v < 0) throw DomainError("tabulated b is negative at m = " + std::to_string(m));
        return v;
    }
    }
    return 0.0;
}

double deformation_f(double m, const GenDeformation& gd, double q) {
    double e = q - 1;
    return 1 + e * m + e * e * (gd.alpha * m + gd.bval(m));
}

ReductionCheck reduction_check(double m, const GenDeformation& gd, double dq) {
    double fp = deformation_f(m, gd, 1 + dq), fm = deformation_f(m, gd, 1 - dq);
    return {deformation_f(m, gd, 1.0) - 1.0, (fp - fm) / (2 * dq) - m};
}

double jpjm_expect(double f, double c, const GenDeformation& gd) {
    double gt = std::pow(gd.q1, -0.25) * std::sqrt(f);
    double x = gt - 1 / gt;
    return (c - gd.C1 * x * x) / gd.C2;
}

double jmjp_expect(double f, double c, const GenDeformation& gd) {
    return jpjm_expect(f, c, gd) - 2 * (f - 1 / f) / gd.h;
}

UnitarityWindow unitarity_window(double c, const GenDeformation& gd) {
    UnitarityWindow w;
    w.c = c;
    double rq = std::sqrt(gd.q1);
    double beta = 1 + c / (2 * gd.C1);
    double rad = std::sqrt(std::max(0.0, beta * beta - 1));
    w.L1 = rq * (beta - rad);
    w.L2 = rq * (beta + rad);

    // c - C1 (f/rq + rq/f - 2) - (2 C2/h)(f - 1/f) >= 0, times f/C1:
    // a f^2 - 2 beta f + b0 <= 0
    double rho = 2 * gd.C2 / (gd.C1 * gd.h);
    double a = 1 / rq + rho, b0 = rq - rho;
    double disc = beta * beta - a * b0;
    if (disc >= 0 && a > 0) {
        double sd = std::sqrt(disc);
        w.l1 = (beta - sd) / a;
        w.l2 = (beta + sd) / a;
    } else {
        w.l1 = w.l2 = std::nan("");
    }

    double rho_p = 2 * gd.C2_printed / (gd.C1 * gd.h);
    double ap = 1 / (1 + rho_p), am = 1 / (1 - rho_p);
    double dp = beta * beta * ap * ap - ap / am;
    w.printed_real = dp >= 0;
    if (w.printed_real) {
        w.l1_printed = rq * (beta * ap - std::sqrt(dp));
        w.l2_printed = rq * (beta * ap + std::sqrt(dp));
    } else {
        w.l1_printed = w.l2_printed = std::nan("");
    }

    if (std::isnan(w.l1)) {
        w.empty = true;
        return w;
    }
    w.f_min = std::max({w.L1, w.l1, 0.0});
    w.f_max = std::min(w.L2, w.l2);
    w.empty = !(w.f_max > w.f_min);
    return w;
}

double window_c_min(const GenDeformation& gd, double tol) {
    double hi = 1.0;
    int guard = 0;
    while (unitarity_window(hi, gd).empty) {
        hi *= 2;
        if (++guard > 200) throw NumericalFailure("window stays empty for all tested c");
    }
    double lo = 0.0;
    if (!unitarity_window(lo, gd).empty) return 0.0;
    while (hi - lo > tol * std::max(1.0, hi)) {
        double mid = 0.5 * (lo + hi);
        if (unitarity_window(mid, gd).empty) lo = mid;
        else hi = mid;
    }
    return hi;
}

std::vector<double> spectrum_2jz(const GenDeformation& gd, const std::vector<double>& m_range) {
    std::vector<double> out;
    for (double m : m_range) {
        double f = deformation_f(m, gd, gd.q1);
        if (!(f > 0)) throw DomainError("f(m, q1) <= 0 at m = " + std::to_string(m));
        out.push_back(2 * (f - 1 / f) / gd.h);
    }
    return out;
}

Accumulation detect_accumulation(const std::vector<double>& v, int tail, double tol) {
    Accumulation a;
    int n = (int)v.size();
    if (n < 2 * tail + 1) return a;
    auto monotone_settling = [&](int from, int step) {
        // successive differences shrink and keep one sign
        double prev = 0;
        int sign = 0;
        for (int t = 0; t + 1 < tail; ++t) {
            double dlt = v[from + step * (t + 1)] - v[from + step * t];
            int sg = (dlt > 0) - (dlt < 0);
            if (sg != 0) {
                if (sign != 0 && sg != sign) return false;
                sign = sg;
            }
            if (t > 0 && std::abs(dlt) > std::abs(prev) + 1e-15) return false;
            prev = dlt;
        }
        return true;
    };
    bool left_ok = monotone_settling(tail - 1, -1);
    bool right_ok = monotone_settling(n - tail, 1);
    a.left = v.front();
    a.right = v.back();
    a.found = left_ok && right_ok && std::abs(a.left - a.right) <= tol * std::max(1.0, std::abs(a.right));
    a.value = 0.5 * (a.left + a.right);
    return a;
}

GenRep build_gen_rep(const GenDeformation& gd, int dim, double c) {
    if (dim < 3) throw DomainError("representation needs dim >= 3");
    if (unitarity_window(c, gd).empty) throw DomainError("unitarity window is empty at this c");
    GenRep r;
    r.c = c;
    for (int i = 0; i < dim; ++i) {
        double m = -(dim - 1) / 2.0 + i;
        double f = deformation_f(m, gd, gd.q1);
        if (!(f > 0)) throw DomainError("f(m, q1) <= 0 at m = " + std::to_string(m));
        r.basis.push_back(m);
        r.f.push_back(f);
    }
    std::vector<double> phi(dim);
    for (int i = 0; i < dim; ++i) phi[i] = 2 * (r.f[i] - 1 / r.f[i]) / gd.h;
    // midpoint anchor first, then the two ends; telescoping away from an end keeps |N|^2 growing
    auto telescope = [&](int a) {
        std::vector<double> n2(dim - 1, 0.0);
        n2[a - 1] = jpjm_expect(r.f[a], c, gd);
        for (int i = a; i < dim - 1; ++i) n2[i] = n2[i - 1] - phi[i];
        for (int i = a - 2; i >= 0; --i) n2[i] = n2[i + 1] + phi[i + 1];
        return n2;
    };
    double worst = 0;
    int worst_i = 0;
    bool ok = false;
    for (int a : {dim / 2, 1, dim - 1}) {
        r.n2 = telescope(a);
        r.anchor = a;
        auto it = std::min_element(r.n2.begin(), r.n2.end());
        if (*it >= 0) { ok = true; break; }
        if (a == dim / 2) { worst = *it; worst_i = (int)(it - r.n2.begin()); }
    }
    if (!ok) {
        std::ostringstream msg;
        msg << "no unitary truncation at any anchor: |N|^2 = " << worst << " between m = " << r.basis[worst_i]
            << " and " << r.basis[worst_i + 1];
        throw DomainError(msg.str());
    }
    r.Jz = MatrixXd::Zero(dim, dim);
    r.Jplus = MatrixXd::Zero(dim, dim);
    r.g = MatrixXd::Zero(dim, dim);
    r.ginv = MatrixXd::Zero(dim, dim);
    r.gt = MatrixXd::Zero(dim, dim);
    double n4 = std::pow(gd.q1, -0.25);
    for (int i = 0; i < dim; ++i) {
        r.Jz(i, i) = r.basis[i];
        r.g(i, i) = std::sqrt(r.f[i]);
        r.ginv(i, i) = 1 / r.g(i, i);
        r.gt(i, i) = n4 * r.g(i, i);
    }
    for (int i = 0; i + 1 < dim; ++i) r.Jplus(i + 1, i) = std::sqrt(r.n2[i]);
    r.Jminus = r.Jplus.transpose();
    return r;
}

namespace {

double interior(const MatrixXd& m, int lo, int hi) {
    double r = 0;
    for (int i = lo; i < hi; ++i)
        for (int j = lo; j < hi; ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

// indices (i*n + j) with both factors inside [margin, n - margin)
double interior2(const MatrixXd& m, int n, int margin) {
    double r = 0;
    auto ok = [&](int k) {
        int i = k / n, j = k % n;
        return i >= margin && i < n - margin && j >= margin && j < n - margin;
    };
    for (int a = 0; a < m.rows(); ++a) {
        if (!ok(a)) continue;
        for (int b = 0; b < m.cols(); ++b)
            if (ok(b)) r = std::max(r, std::abs(m(a, b)));
    }
    return r;
}

enum Sym { JP, JM, G, GI, ONE };

struct Term {
    double c;
    Sym a, b;
};

std::vector<Term> coproduct(Sym x) {
    switch (x) {
    case JP: return {{1, JP, GI}, {1, G, JP}};
    case JM: return {{1, JM, GI}, {1, G, JM}};
    case G: return {{1, G, G}};
    case GI: return {{1, GI, GI}};
    case ONE: return {{1, ONE, ONE}};
    }
    return {};
}

double counit(Sym x) { return (x == JP || x == JM) ? 0.0 : 1.0; }

} // namespace

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

GenRepChecks check_gen_rep(const GenDeformation& gd, const GenRep& r) {
    GenRepChecks k;
    int n = (int)r.basis.size();
    MatrixXd g2 = r.g * r.g, gi2 = r.ginv * r.ginv;
    MatrixXd comm = r.Jplus * r.Jminus - r.Jminus * r.Jplus - 2 * (g2 - gi2) / gd.h;
    // bottom row of J+J- and top row of J-J+ are cut by the truncation
    k.commutator = interior(comm, 1, n - 1);
    k.rescale_plus = interior(g2 * r.Jplus * gi2 - gd.q1 * r.Jplus, 0, n);
    k.rescale_minus = interior(g2 * r.Jminus * gi2 - r.Jminus / gd.q1, 0, n);
    MatrixXd gm = r.gt - r.gt.inverse();
    MatrixXd C = gd.C1 * gm * gm + gd.C2 * r.Jplus * r.Jminus;
    double lo = 1e300, hi = -1e300, sum = 0;
    for (int i = 1; i < n; ++i) {
        lo = std::min(lo, C(i, i));
        hi = std::max(hi, C(i, i));
        sum += C(i, i);
    }
    k.casimir_spread = hi - lo;
    k.casimir_mean = sum / (n - 1);
    MatrixXd off = C;
    off.diagonal().setZero();
    k.casimir_offdiag = off.cwiseAbs().maxCoeff();
    return k;
}

HopfReport hopf_axiom_report(const GenDeformation& gd, const GenRep& r, int margin) {
    int n = (int)r.basis.size();
    MatrixXd I = MatrixXd::Identity(n, n);
    std::array<MatrixXd, 5> M{r.Jplus, r.Jminus, r.g, r.ginv, I};
    auto mat = [&](Sym s) -> const MatrixXd& { return M[s]; };
    double q = gd.q1;
    HopfReport rep;

    auto coassoc = [&](Sym x) {
        MatrixXd lhs = MatrixXd::Zero(n * n * n, n * n * n), rhs = lhs;
        for (const Term& t : coproduct(x)) {
            for (const Term& u : coproduct(t.a)) lhs += t.c * u.c * kron(kron(mat(u.a), mat(u.b)), mat(t.b));
            for (const Term& u : coproduct(t.b)) rhs += t.c * u.c * kron(mat(t.a), kron(mat(u.a), mat(u.b)));
        }
        return (lhs - rhs).cwiseAbs().maxCoeff();
    };
    rep.coassoc_jp = coassoc(JP);
    rep.coassoc_jm = coassoc(JM);
    rep.coassoc_g = coassoc(G);
    rep.coassoc_ginv = coassoc(GI);

    for (Sym x : {JP, JM, G, GI}) {
        MatrixXd left = MatrixXd::Zero(n, n), right = left;
        for (const Term& t : coproduct(x)) {
            left += t.c * counit(t.a) * mat(t.b);
            right += t.c * counit(t.b) * mat(t.a);
        }
        rep.counit = std::max({rep.counit, (left - mat(x)).cwiseAbs().maxCoeff(),
                               (right - mat(x)).cwiseAbs().maxCoeff()});
    }

    auto antipode = [&](double power, double& out_left, double& out_right) {
        auto S = [&](Sym s) -> MatrixXd {
            switch (s) {
            case JP: return -std::pow(q, -power) * r.Jplus;
            case JM: return -std::pow(q, power) * r.Jminus;
            case G: return r.ginv;
            case GI: return r.g;
            default: return I;
            }
        };
        out_left = out_right = 0;
        for (Sym x : {JP, JM}) {
            MatrixXd left = MatrixXd::Zero(n, n), right = left;
            for (const Term& t : coproduct(x)) {
                left += t.c * S(t.a) * mat(t.b);
                right += t.c * mat(t.a) * S(t.b);
            }
            MatrixXd target = counit(x) * I;
            out_left = std::max(out_left, interior(left - target, margin, n - margin));
            out_right = std::max(out_right, interior(right - target, margin, n - margin));
        }
    };
    antipode(1.0, rep.antipode_left, rep.antipode_right);
    antipode(0.5, rep.antipode_half_left, rep.antipode_half_right);
    {
        MatrixXd sg = r.ginv * r.g - I, sgi = r.g * r.ginv - I;
        rep.antipode_g = std::max(sg.cwiseAbs().maxCoeff(), sgi.cwiseAbs().maxCoeff());
    }

    MatrixXd dP = kron(r.Jplus, r.ginv) + kron(r.g, r.Jplus);
    MatrixXd dM = kron(r.Jminus, r.ginv) + kron(r.g, r.Jminus);
    MatrixXd g2 = r.g * r.g, gi2 = r.ginv * r.ginv;
    MatrixXd target = 2 * (kron(g2, g2) - kron(gi2, gi2)) / gd.h;
    rep.homomorphism = interior2(dP * dM - dM * dP - target, n, margin);
    return rep;
}

} // namespace qdef
