#include "qdef/qnum.hpp"
#include "qdef/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qdef {

Deformation::Deformation(double s_) : s(s_) {
    if (!std::isfinite(s_))
        throw SingularDeformation("deformation parameter s is not finite");
    double k = std::round(s_ / std::numbers::pi);
    if (std::abs(s_ - k * std::numbers::pi) < 1e-12)
        throw SingularDeformation("s = " + std::to_string(s_) +
                                  " is a multiple of pi (sin s = 0)");
    sin_s = std::sin(s_);
    cos_s = std::cos(s_);
    eta_sq = -4.0 * sin_s * sin_s;
}

double qnumber(double x, const Deformation& d) {
    return std::sin(x * d.s) / d.sin_s;
}

std::complex<double> qnumber_complex(std::complex<double> x, const Deformation& d) {
    return std::sin(x * d.s) / d.sin_s;
}

std::complex<double> qnumber_complex_printed(std::complex<double> x, const Deformation& d) {
    using C = std::complex<double>;
    double a = x.real(), b = x.imag();
    double qa = qnumber(a, d);
    double qb_h = b == 0.0 ? 0.0 : qnumber_hyperbolic(b, d.s);
    double two_h = 2.0 * std::cosh(d.s);  // [2] at q = e^s
    double two = 2.0 * d.cos_s;
    C first = qa * std::sqrt(C(1.0 + qb_h * qb_h * (1.0 - two_h * two_h / 4.0)));
    C second = C(0.0, 1.0) * qb_h * std::sqrt(C(1.0 - qa * qa * (1.0 - two * two / 4.0)));
    return first + second;
}

double qnumber_hyperbolic(double x, double t) {
    if (t == 0.0)
        throw DomainError("hyperbolic q-number needs t != 0");
    return std::sinh(x * t) / std::sinh(t);
}

std::vector<double> bracket_sequence(const std::vector<double>& m_values, const Deformation& d) {
    std::vector<double> out;
    out.reserve(m_values.size());
    for (double m : m_values) out.push_back(qnumber(2.0 * m, d));
    return out;
}

} // namespace qdef
