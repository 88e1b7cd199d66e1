#ifndef WAVELAB_INITIAL_DATA_HPP
#define WAVELAB_INITIAL_DATA_HPP

#include <functional>
#include <string>

#include "wavelab/exponents.hpp"

namespace wavelab {

// Radial initial data (u0, u1) with analytic derivatives where the family
// admits them. ru1_primitive(x) = int_0^x s*u1(s) ds feeds the d'Alembert
// oracle; d2u0/du1 may be empty for families that never meet the oracle.
struct InitialData {
    std::string name;
    std::function<double(double)> u0;
    std::function<double(double)> du0;
    std::function<double(double)> d2u0;
    std::function<double(double)> u1;
    std::function<double(double)> du1;
    std::function<double(double)> ru1_primitive;
    double support_radius = 0.0;  // field negligible beyond this radius
};

// u0 = A exp(-((r-r0)/s)^2), u1 = 0.
InitialData gaussian_bump(double A, double r0, double s);

// Compactly supported C-infinity bump A exp(-1/(1-x^2)), x = (r-r0)/s, |x|<1.
InitialData smooth_bump(double A, double r0, double s);

// u0 = (1+r)^{-q}, q = 2(p+d+1)/(p+1)^2 + eps, u1 = 0, tapered smoothly to
// zero across [r_max/4, r_max/2]. Finite weighted energy E_kappa for
// kappa = kappa_0 but not in the scale-invariant Sobolev space.
InitialData polynomial_tail(double eps, const ModelParams& mp, double r_max);

double polynomial_tail_exponent(double eps, const ModelParams& mp);

} // namespace wavelab

#endif
