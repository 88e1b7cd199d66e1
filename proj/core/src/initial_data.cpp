#include "wavelab/initial_data.hpp"

#include <cmath>

namespace wavelab {

namespace {

double zero_fn(double) { return 0.0; }

// C-infinity bridge: 1 on x<=0, 0 on x>=1.
double bridge(double x) {
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return b / (a + b);
}

double bridge_deriv(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double h = 1e-6;
    return (bridge(x + h) - bridge(x - h)) / (2.0 * h);
}

} // namespace

InitialData gaussian_bump(double A, double r0, double s) {
    InitialData d;
    d.name = "gaussian";
    d.u0 = [=](double r) { double x = (r - r0) / s; return A * std::exp(-x * x); };
    d.du0 = [=](double r) {
        double x = (r - r0) / s;
        return -2.0 * A * x / s * std::exp(-x * x);
    };
    d.d2u0 = [=](double r) {
        double x = (r - r0) / s;
        return A * (4.0 * x * x - 2.0) / (s * s) * std::exp(-x * x);
    };
    d.u1 = zero_fn;
    d.du1 = zero_fn;
    d.ru1_primitive = zero_fn;
    d.support_radius = r0 + 8.0 * s;
    return d;
}

InitialData smooth_bump(double A, double r0, double s) {
    InitialData d;
    d.name = "bump";
    auto val = [=](double r) {
        double x = (r - r0) / s;
        if (std::abs(x) >= 1.0) return 0.0;
        return A * std::exp(-1.0 / (1.0 - x * x));
    };
    d.u0 = val;
    d.du0 = [=](double r) {
        double x = (r - r0) / s;
        if (std::abs(x) >= 1.0) return 0.0;
        double q = 1.0 - x * x;
        return val(r) * (-2.0 * x / (q * q)) / s;
    };
    d.d2u0 = [=](double r) {
        // numerically adequate; the bump never meets the closed-form oracle
        const double h = 1e-5;
        return (val(r + h) - 2.0 * val(r) + val(r - h)) / (h * h);
    };
    d.u1 = zero_fn;
    d.du1 = zero_fn;
    d.ru1_primitive = zero_fn;
    d.support_radius = r0 + s;
    return d;
}

double polynomial_tail_exponent(double eps, const ModelParams& mp) {
    return 2.0 * (mp.p + mp.d + 1.0) / ((mp.p + 1.0) * (mp.p + 1.0)) + eps;
}

InitialData polynomial_tail(double eps, const ModelParams& mp, double r_max) {
    InitialData d;
    d.name = "polynomial_tail";
    const double q = polynomial_tail_exponent(eps, mp);
    const double taper_lo = 0.25 * r_max, taper_hi = 0.5 * r_max;
    auto cut = [=](double r) { return bridge((r - taper_lo) / (taper_hi - taper_lo)); };
    auto dcut = [=](double r) {
        return bridge_deriv((r - taper_lo) / (taper_hi - taper_lo)) / (taper_hi - taper_lo);
    };
    d.u0 = [=](double r) { return std::pow(1.0 + r, -q) * cut(r); };
    d.du0 = [=](double r) {
        return -q * std::pow(1.0 + r, -q - 1.0) * cut(r) + std::pow(1.0 + r, -q) * dcut(r);
    };
    d.u1 = zero_fn;
    d.du1 = zero_fn;
    d.ru1_primitive = zero_fn;
    d.support_radius = taper_hi;
    return d;
}

} // namespace wavelab
