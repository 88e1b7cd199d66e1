#include "wavelab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wavelab {

double p_conf(int d)            { return 1.0 + 4.0 / (d - 1); }
double p_energy_critical(int d) { return 1.0 + 4.0 / (d - 2); }

double a_min(int d, double p) {
    const double num = (d - 2) * p - d;
    return -0.25 * (d - 2) * (d - 2) + num * num / (4.0 * p * p);
}

double sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

ModelParams validate(int d, double p, double a) {
    if (d < 3 || d > 6) {
        std::ostringstream os;
        os << "dimension d=" << d << " outside [3,6]";
        throw DimensionOutOfRange(d, os.str());
    }
    const double lo = p_conf(d), hi = p_energy_critical(d);
    if (!(p >= lo && p < hi)) {
        std::ostringstream os;
        os << "exponent p=" << p << " outside [" << lo << "," << hi << ")";
        throw ExponentOutOfRange(p, lo, hi, os.str());
    }
    const double thr = a_min(d, p);
    if (!(a > thr)) {
        std::ostringstream os;
        os << "potential a=" << a << " not above a_min(d,p)=" << thr;
        throw PotentialBelowThreshold(a, thr, os.str());
    }
    return ModelParams{d, p, a};
}

DerivedConstants derive(const ModelParams& mp) {
    const int d = mp.d;
    const double p = mp.p, a = mp.a;
    DerivedConstants c;
    c.s_p         = 0.5 * d - 2.0 / (p - 1.0);
    c.sigma       = 0.5 * (d - 2) - std::sqrt(0.25 * (d - 2) * (d - 2) + a);
    c.lambda_d    = 0.25 * (d - 1) * (d - 3);
    c.mu_d        = 0.25 * (d * d - 1);
    c.kappa_0     = ((d + 2) - (d - 2) * p) / (p + 1.0);
    c.beta        = ((d - 1) * (p - 1.0) - 2.0) / (2.0 * (p + 1.0));
    c.a_min       = a_min(d, p);
    c.c_d         = sphere_area(d);
    c.hardy_const = 0.25 * (d - 2) * (d - 2);
    return c;
}

namespace {

// Window endpoints of the admissibility proposition, d=3 and d>=4 branches.
void gamma_window(int d, double q, double a, double& lo, double& hi) {
    const double iq = inv_q(q);
    if (d == 3) {
        lo = -std::min({1.0, std::sqrt(a + 2.25) - 0.5, std::sqrt(a + 0.25) + 1.0});
        hi = std::min({2.0, std::sqrt(a + 2.25) + 0.5, std::sqrt(a + 0.25) + 1.0 - iq});
    } else {
        const double edge = (d + 3.0) / (2.0 * (d - 1.0));
        lo = -std::min({0.5 * d - edge,
                        std::sqrt(a + 0.25 * d * d) - edge,
                        std::sqrt(a + 0.25 * (d - 2) * (d - 2)) + 1.0});
        hi = std::min({0.5 * (d + 1.0),
                       std::sqrt(a + 0.25 * d * d) + 0.5,
                       std::sqrt(a + 0.25 * (d - 2) * (d - 2)) + 1.0 - inv_q(q)});
    }
}

} // namespace

AdmissibilityResult strichartz_admissible(int d, double q, double r, double gamma, double a) {
    AdmissibilityResult res;
    const double boundary_eps = 1e-9;

    if (!(q >= 2.0))
        res.violated.push_back("q >= 2 required");
    if (!(r >= 2.0) || std::isinf(r))
        res.violated.push_back("r in [2, infinity) required");
    if (d == 3 && !(q > 2.0))
        res.violated.push_back("q > 2 required when d = 3");

    const double lhs = inv_q(q) + (d - 1.0) / (2.0 * r);
    const double cap = (d - 1.0) / 4.0;
    if (!(lhs <= cap))
        res.violated.push_back("1/q + (d-1)/(2r) <= (d-1)/4 fails");
    if (std::abs(lhs - cap) < boundary_eps)
        res.near_boundary.push_back("admissible condition at equality");

    // scaling condition 1/q + d/r = d/2 - gamma must hold for the given gamma
    const double gamma_scaling = 0.5 * d - inv_q(q) - d / r;
    if (std::abs(gamma - gamma_scaling) > 1e-10)
        res.violated.push_back("gamma inconsistent with scaling condition");

    double lo = 0.0, hi = 0.0;
    gamma_window(d, q, a, lo, hi);
    if (!(gamma > lo && gamma < hi))
        res.violated.push_back("gamma outside the strict admissible window");
    if (std::min(std::abs(gamma - lo), std::abs(gamma - hi)) < boundary_eps)
        res.near_boundary.push_back("gamma within 1e-9 of a window endpoint");

    res.admissible = res.violated.empty();
    return res;
}

StrichartzTriple nonlinearity_triple(int d, double p) {
    const double den = (d - 2) * p - d;
    StrichartzTriple t;
    t.q = (den == 0.0) ? std::numeric_limits<double>::infinity() : 2.0 * p / den;
    t.r = 2.0 * p;
    t.gamma = 1.0;
    return t;
}

} // namespace wavelab
