#ifndef WAVELAB_EXPONENTS_HPP
#define WAVELAB_EXPONENTS_HPP

#include <limits>
#include <string>
#include <vector>

#include "wavelab/errors.hpp"

namespace wavelab {

// Closed-form parameter algebra for the radial defocusing wave equation
//   u_tt + (-Laplace + a/|x|^2) u = -|u|^{p-1} u   on R^d.
// All quantities are dimensionless; everything here is a pure function.

struct ModelParams {
    int d;      // spatial dimension, 3..6
    double p;   // nonlinearity power, p_conf(d) <= p < p_e(d)
    double a;   // potential coefficient, a > a_min(d,p)
};

struct DerivedConstants {
    double s_p;          // critical regularity d/2 - 2/(p-1)
    double sigma;        // (d-2)/2 - sqrt((d-2)^2/4 + a)
    double lambda_d;     // (d-1)(d-3)/4
    double mu_d;         // (d^2-1)/4
    double kappa_0;      // ((d+2)-(d-2)p)/(p+1)
    double beta;         // ((d-1)(p-1)-2)/(2(p+1))
    double a_min;        // -(d-2)^2/4 + ((d-2)p-d)^2/(4p^2)
    double c_d;          // surface area of the unit sphere, 2 pi^{d/2}/Gamma(d/2)
    double hardy_const;  // (d-2)^2/4
};

struct StrichartzTriple {
    double q;      // time exponent; +infinity allowed (1/q evaluates to 0)
    double r;      // space exponent
    double gamma;  // regularity, related by 1/q + d/r = d/2 - gamma
};

// Outcome of the Prop-2.3 style admissibility decision. `violated` names the
// failed conditions; `near_boundary` lists conditions within 1e-9 of a window
// endpoint (reported rather than silently resolved).
struct AdmissibilityResult {
    bool admissible = false;
    std::vector<std::string> violated;
    std::vector<std::string> near_boundary;
};

double p_conf(int d);           // 1 + 4/(d-1)
double p_energy_critical(int d);// 1 + 4/(d-2)
double a_min(int d, double p);
double sphere_area(int d);      // c_d

ModelParams validate(int d, double p, double a);
DerivedConstants derive(const ModelParams& mp);

AdmissibilityResult strichartz_admissible(int d, double q, double r, double gamma, double a);

// The nonlinearity-adapted triple L_t^{2p/((d-2)p-d)} L_x^{2p} with gamma = 1.
StrichartzTriple nonlinearity_triple(int d, double p);

inline double inv_q(double q) {
    return std::numeric_limits<double>::infinity() == q ? 0.0 : 1.0 / q;
}

} // namespace wavelab

#endif
