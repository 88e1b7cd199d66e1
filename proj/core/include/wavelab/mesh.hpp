#ifndef WAVELAB_MESH_HPP
#define WAVELAB_MESH_HPP

#include <span>
#include <vector>

#include "wavelab/errors.hpp"

namespace wavelab {

// Uniform radial grid with nodes r_j = j*dr, j = 0..n (n+1 nodes).
struct RadialGrid {
    int d = 3;
    double dr = 0.0;
    int n = 0;

    double r_max() const { return n * dr; }
    double r(int j) const { return j * dr; }
    int nodes() const { return n + 1; }
};

RadialGrid make_grid(int d, double r_max, int n);

// Section of the light cone |x| = t - eta between times t1 and t2.
struct ConeSection {
    double eta;
    double t1, t2;
};

// A state in physical variables sampled on the grid nodes.
struct PhysicalState {
    double t = 0.0;
    std::vector<double> u, ur, ut;
};

struct Norms {
    double l2;          // c_d int u^2 r^{d-1} dr
    double h1_dot;      // c_d int u_r^2 r^{d-1} dr
    double lp1;         // c_d int |u|^{p+1} r^{d-1} dr
    double hardy_term;  // c_d int u^2 r^{d-3} dr, origin cell handled below
};

// c_d * int_{ra}^{rb} f(r) r^{d-1} dr by composite trapezoid on the weighted
// samples, with linear treatment of the partial cells at both ends.
double shell_integral(const RadialGrid& g, std::span<const double> f, double ra, double rb);

// Plain trapezoid of already-weighted samples h_j = h(r_j) over [ra, rb].
// No c_d factor, no r^{d-1} weight.
double line_integral(const RadialGrid& g, std::span<const double> h, double ra, double rb);

// int_0^R h dr for integrands behaving like C*r^alpha near the origin
// (alpha > -1). The first `fit_cells` cells are integrated analytically from a
// power fit through nodes fit_cells and 2*fit_cells; trapezoid beyond. Falls
// back to the plain rule when the samples do not look like a power there.
double integrate_power_origin(const RadialGrid& g, std::span<const double> h, double R,
                              int fit_cells = 64);

// 4-point Lagrange interpolation of node samples at radius r, degrading to
// linear at the boundary stencils.
double interpolate(const RadialGrid& g, std::span<const double> f, double r);

// Derivative of the same local interpolant at r.
double interpolate_derivative(const RadialGrid& g, std::span<const double> f, double r);

// Shell norms of a physical state. The hardy integrand u^2/r^2 is never
// evaluated at r = 0: the origin cell contributes the first interior node
// value times that cell's shell volume.
Norms norms(const RadialGrid& g, const PhysicalState& s, double p);

// Same hardy rule, exposed for region-restricted energies: c_d int u^2 r^{d-3}
// over [ra, rb] with the origin-cell convention when ra == 0.
double hardy_integral(const RadialGrid& g, std::span<const double> u, double ra, double rb);

} // namespace wavelab

#endif
