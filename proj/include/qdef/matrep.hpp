#pragma once
#include "qdef/qnum.hpp"

#include <Eigen/Dense>
#include <vector>

namespace qdef {

struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    std::vector<double> basis;
    double s = 0.0;
};

struct RepTriple {
    OperatorMatrix Jz, Jplus, Jminus;
    bool truncated = false;  // ladder continues past an edge of the basis
    double edge_top = 0.0;   // N+ at the top label
    double edge_bottom = 0.0;  // N- at the bottom label
};

struct AlgebraReport {
    double res_jz_jpm = 0;      // [Jz, J+-] -+ J+-
    double res_jp_jm = 0;       // [J+, J-] - [2Jz]
    double res_casimir = 0;     // worse of the two Casimir forms against c*1
    double res_casimir_forms = 0;  // difference between the two forms
    double res_casimir_commute = 0;
    double hermiticity = 0;     // J- - J+^dagger
    double maekawa_s = 0;       // C - cos s [Jz]^2 - (J+J- + J-J+)/2 - 1/(4cos^2(s/2)), s-reading
    double maekawa_2s = 0;      // same with q = e^{2is}: cos 2s and [Jz] at 2s
    double maekawa_2s_spread = 0;  // max - min of the 2s-reading diagonal
    int margin = 0;             // rows dropped at each edge
};

// sqrt(c - [m + sign/2]^2), sign = +1 or -1
double ladder_coeff(const Deformation& d, double c, double m, int sign);

// closed-form value for continuous labels: sqrt(cos^2 b cosh^2(s sigma) + sin^2 b sinh^2(s sigma))/sin s
double ladder_coeff_continuous(const Deformation& d, double m, double sigma, int sign);

RepTriple build_rep(const Deformation& d, double c, const std::vector<double>& m_list);

// margin < 0 picks 0 for closed representations and 2 for truncations
AlgebraReport verify_algebra(const RepTriple& t, const Deformation& d, double c, int margin = -1);

// max |entry| over rows/cols [margin, n - margin)
double interior_max(const Eigen::MatrixXcd& m, int margin);

} // namespace qdef
