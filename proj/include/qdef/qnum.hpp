#pragma once
#include <complex>
#include <vector>

namespace qdef {

struct Deformation {
    double s;
    double sin_s;
    double cos_s;
    double eta_sq;  // -4 sin^2 s

    explicit Deformation(double s);
    std::complex<double> q() const { return std::polar(1.0, s); }
};

enum class QKind { Trigonometric, Hyperbolic };

struct QValue {
    std::complex<double> value;
    std::complex<double> x;
    QKind kind;
};

// [x] = sin(xs)/sin s
double qnumber(double x, const Deformation& d);

std::complex<double> qnumber_complex(std::complex<double> x, const Deformation& d);

// the decomposition printed for [alpha + i beta] in terms of real-q brackets,
// evaluated literally; only used to measure its distance to qnumber_complex
std::complex<double> qnumber_complex_printed(std::complex<double> x, const Deformation& d);

// sinh(xt)/sinh t
double qnumber_hyperbolic(double x, double t);

// [2m] for each m
std::vector<double> bracket_sequence(const std::vector<double>& m_values, const Deformation& d);

} // namespace qdef
