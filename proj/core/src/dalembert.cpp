#include "wavelab/solver.hpp"

#include <cmath>

namespace wavelab {

// ---------------- d'Alembert oracle ----------------

DalembertOracle::DalembertOracle(InitialData data) : data_(std::move(data)) {}

double DalembertOracle::psi(double s) const { return s * data_.u0(std::abs(s)); }

double DalembertOracle::dpsi(double s) const {
    const double a = std::abs(s);
    return data_.u0(a) + a * data_.du0(a);  // even in s
}

double DalembertOracle::chi(double s) const { return s * data_.u1(std::abs(s)); }

double DalembertOracle::Phi(double s) const { return data_.ru1_primitive(std::abs(s)); }

double DalembertOracle::w(double r, double t) const {
    return 0.5 * (psi(r + t) + psi(r - t)) + 0.5 * (Phi(r + t) - Phi(r - t));
}

void DalembertOracle::eval(double r, double t, double& u, double& ur, double& ut) const {
    if (r < 1e-10) {
        u = dpsi(t) + chi(t);
        ur = 0.0;
        const double d2 = data_.d2u0 ? (2.0 * data_.du0(std::abs(t)) * (t >= 0 ? 1 : -1)
                                        + t * data_.d2u0(std::abs(t)))
                                     : 0.0;
        const double dchi = data_.u1(std::abs(t)) + std::abs(t) * data_.du1(std::abs(t));
        ut = d2 + dchi;  // psi''(t) + chi'(t)
        return;
    }
    const double wp = w(r, t);
    const double wr = 0.5 * (dpsi(r + t) + dpsi(r - t)) + 0.5 * (chi(r + t) - chi(r - t));
    const double wt = 0.5 * (dpsi(r + t) - dpsi(r - t)) + 0.5 * (chi(r + t) + chi(r - t));
    u = wp / r;
    ut = wt / r;
    ur = (wr - wp / r) / r;
}

double DalembertOracle::radiation_field(double eta) const {
    return -0.5 * (dpsi(eta) + chi(eta));
}

} // namespace wavelab
