#include "qdef/matrep.hpp"
#include "qdef/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdef {

using Eigen::MatrixXcd;

namespace {

double sq(double x) { return x * x; }

MatrixXcd diag_of(const std::vector<double>& v) {
    MatrixXcd m = MatrixXcd::Zero(v.size(), v.size());
    for (size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
    return m;
}

} // namespace

double ladder_coeff(const Deformation& d, double c, double m, int sign) {
    double r = c - sq(qnumber(m + 0.5 * sign, d));
    if (r < 0) {
        // boundary rounding of a closed ladder
        if (r > -1e-12 * std::max(1.0, c)) return 0.0;
        std::ostringstream msg;
        msg << "unitarity violated: c = " << c << ", m = " << m << ", sign "
            << (sign > 0 ? "+" : "-") << ", radicand " << r;
        throw UnitarityViolation(msg.str());
    }
    return std::sqrt(r);
}

double ladder_coeff_continuous(const Deformation& d, double m, double sigma, int sign) {
    double b = -sign * m * d.s - d.s / 2;
    double ch = std::cosh(sigma * d.s), sh = std::sinh(sigma * d.s);
    double cb = std::cos(b), sb = std::sin(b);
    return std::sqrt(cb * cb * ch * ch + sb * sb * sh * sh) / std::abs(d.sin_s);
}

double interior_max(const MatrixXcd& m, int margin) {
    long n = m.rows();
    double r = 0;
    for (long i = margin; i < n - margin; ++i)
        for (long j = margin; j < n - margin; ++j) r = std::max(r, std::abs(m(i, j)));
    return r;
}

RepTriple build_rep(const Deformation& d, double c, const std::vector<double>& m_list) {
    size_t n = m_list.size();
    if (n == 0) throw DomainError("empty basis");
    for (size_t i = 1; i < n; ++i)
        if (std::abs(m_list[i] - m_list[i - 1] - 1.0) > 1e-12)
            throw DomainError("basis labels must be spaced by exactly 1");
    RepTriple t;
    t.Jz = {diag_of(m_list), m_list, d.s};
    MatrixXcd P = MatrixXcd::Zero(n, n);
    for (size_t i = 0; i + 1 < n; ++i) P(i + 1, i) = ladder_coeff(d, c, m_list[i], +1);
    t.Jplus = {P, m_list, d.s};
    t.Jminus = {P.adjoint(), m_list, d.s};
    t.edge_top = std::sqrt(std::max(0.0, c - sq(qnumber(m_list.back() + 0.5, d))));
    t.edge_bottom = std::sqrt(std::max(0.0, c - sq(qnumber(m_list.front() - 0.5, d))));
    t.truncated = t.edge_top > 1e-10 || t.edge_bottom > 1e-10;
    return t;
}

AlgebraReport verify_algebra(const RepTriple& t, const Deformation& d, double c, int margin) {
    AlgebraReport r;
    r.margin = margin >= 0 ? margin : (t.truncated ? 2 : 0);
    const auto& B = t.Jz.basis;
    size_t n = B.size();
    const MatrixXcd& Z = t.Jz.entries;
    const MatrixXcd& P = t.Jplus.entries;
    const MatrixXcd& M = t.Jminus.entries;
    MatrixXcd I = MatrixXcd::Identity(n, n);

    std::vector<double> two_m, up, dn, qz, qz2;
    for (double m : B) {
        two_m.push_back(qnumber(2 * m, d));
        up.push_back(sq(qnumber(m + 0.5, d)));
        dn.push_back(sq(qnumber(m - 0.5, d)));
        qz.push_back(sq(qnumber(m, d)));
        qz2.push_back(sq(std::sin(2 * d.s * m) / std::sin(2 * d.s)));
    }

    r.res_jz_jpm = std::max(interior_max(Z * P - P * Z - P, r.margin),
                            interior_max(Z * M - M * Z + M, r.margin));
    r.res_jp_jm = interior_max(P * M - M * P - diag_of(two_m), r.margin);

    MatrixXcd Ca = diag_of(up) + M * P;
    MatrixXcd Cb = diag_of(dn) + P * M;
    r.res_casimir = std::max(interior_max(Ca - c * I, r.margin), interior_max(Cb - c * I, r.margin));
    r.res_casimir_forms = interior_max(Ca - Cb, r.margin);
    // margin + 1 so the products with the truncated Casimir stay inside valid rows
    int cm = r.margin > 0 ? r.margin + 1 : 0;
    r.res_casimir_commute = std::max({interior_max(Cb * Z - Z * Cb, cm),
                                      interior_max(Cb * P - P * Cb, cm),
                                      interior_max(Cb * M - M * Cb, cm)});
    r.hermiticity = (M - P.adjoint()).cwiseAbs().maxCoeff();

    MatrixXcd sym = 0.5 * (P * M + M * P);
    double target = 1.0 / (4 * sq(std::cos(d.s / 2)));
    r.maekawa_s = interior_max(Cb - d.cos_s * diag_of(qz) - sym - target * I, r.margin);
    MatrixXcd m2 = Cb - std::cos(2 * d.s) * diag_of(qz2) - sym;
    r.maekawa_2s = interior_max(m2 - target * I, r.margin);
    double lo = 1e300, hi = -1e300;
    for (long i = r.margin; i < (long)n - r.margin; ++i) {
        lo = std::min(lo, m2(i, i).real());
        hi = std::max(hi, m2(i, i).real());
    }
    r.maekawa_2s_spread = hi >= lo ? hi - lo : 0.0;
    return r;
}

} // namespace qdef
