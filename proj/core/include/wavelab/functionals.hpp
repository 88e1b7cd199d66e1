#ifndef WAVELAB_FUNCTIONALS_HPP
#define WAVELAB_FUNCTIONALS_HPP

#include <span>
#include <vector>

#include "wavelab/solver.hpp"

namespace wavelab {

struct Region {
    enum Kind { ball, annulus, all } kind = all;
    double r1 = 0.0, r2 = 0.0;
    static Region make_ball(double R) { return {ball, 0.0, R}; }
    static Region make_annulus(double R1, double R2) { return {annulus, R1, R2}; }
    static Region make_all() { return {all, 0.0, 0.0}; }
};

struct EnergyBreakdown {
    double kinetic = 0, gradient = 0, hardy = 0, nonlinear = 0, total = 0;
    Region region;
};

struct FluxReport {
    ConeSection cone{};
    double flux_value = 0;       // RHS integral of the flux formula over [t1,t2]
    double energy_delta = 0;     // E(t2;B(t2-eta)) - E(t1;B(t1-eta))
    double residual = 0;
    double total_energy = 0;     // E at t=0, the normalization
    // whole sampled cone, surface-measure normalization (integrals against dS/sqrt2):
    double outgoing_sq = 0;      // int (u_r+u_t)^2
    double hardy_sq = 0;         // int u^2/|x|^2
    double hardy_slack = 0;      // outgoing_sq - (d-2)^2/4 * hardy_sq
    double full_cone_flux = 0;   // int (|u_r+u_t|^2 + u^2/x^2 + |u|^{p+1})
    double flux_over_energy = 0; // recorded constant of the full-cone bound
};

struct HardyReport {
    double R = 0;
    double f_R = 0;              // local quadratic form + sigma boundary term
    double identity_value = 0;   // int |grad u + sigma x/|x|^2 u|^2 over the ball
    double boundary_term = 0;
    double eq2_lhs = 0;          // int (|grad u|^2 + u^2/x^2) over the ball
    double eq2_bound = 0;        // explicit-constant right side
    double corollary_lhs = 0;    // f_R without the boundary term
    double corollary_bound = 0;  // -sigma/R * surface integral of u^2
    double scale = 0;
};

struct MorawetzReport {
    double R = 0, T1 = 0, T2 = 0;
    double interior_term = 0;    // (1/2R) iint_{|x|<R} (...) dx dt
    double surface_term = 0;     // (d-1)/(4R^2) iint_{|x|=R} u^2 dS dt
    double exterior_term = 0;    // weighted exterior space-time integrals
    double endpoint_term = 0;    // (mu_d+a-2sigma)/(2R^2) endpoint L2 masses
    double lhs_total = 0;
    double rhs = 0;              // 2E + (1/2)(-lambda_d+|a|) * endpoint tails
    double virial_T1 = 0, virial_T2 = 0;
    double slack = 0;            // rhs - lhs_total
    double budget = 0;
};

struct RetardedReport {
    double R = 0, T = 0;
    double lhs = 0;              // iint_{R<t<T, |x|<R} energy density
    double rhs = 0;
    double slack = 0;
    double budget = 0;
};

struct Envelopes {
    double radial_sobolev;       // sup r^{(d-2)/2}|u| / ||u||_{H1dot}
    double decay_envelope;       // sup r^{2(d-1)/(p+3)}|u| / (||u||^{2/(p+3)} ||u||_{p+1}^{(p+1)/(p+3)})
};

struct TailDecayEntry {
    double r, t;
    double exterior_energy;      // over |x| > r + |t|, unnormalized density
    double bound;                // r^{-kappa} E_{kappa,r}
    double ratio;
};

struct TailDecayReport {
    double kappa = 0;
    std::vector<TailDecayEntry> entries;
    double max_ratio = 0;
    double max_pointwise_ratio = 0;
};

// Per-step scalar series recorded along a run.
struct TimeSeries {
    std::vector<double> t, v;
    double integrate(double t1, double t2) const;   // trapezoid on the recorded lattice
    double at(double tq) const;                     // linear interpolation
};

EnergyBreakdown energy(const SolverConfig& cfg, const PhysicalState& s, Region region);
double weighted_energy(const SolverConfig& cfg, const PhysicalState& s, double kappa);
double tail_energy(const SolverConfig& cfg, const PhysicalState& s, double kappa, double r);

FluxReport cone_flux(const Trajectory& traj, double eta, double t1, double t2);

HardyReport hardy_local(const RadialGrid& g, const PhysicalState& s, double R, double a);

double virial(const SolverConfig& cfg, const PhysicalState& s, double R);

Envelopes pointwise_envelopes(const RadialGrid& g, const PhysicalState& s, double p);

// Two-sided run with the space-time accumulators the Morawetz machinery needs.
struct MorawetzRun {
    Trajectory traj;
    std::vector<double> radii;
    // per-radius series, t ascending over [-t_back, t_final]
    std::vector<TimeSeries> line_density;     // interior Morawetz line-1 integrand
    std::vector<TimeSeries> surface_u2;       // int_{|x|=R} u^2 dS
    std::vector<TimeSeries> exterior_mixed;   // exterior |u|^{p+1}/|x| and (a+lambda)u^2/|x|^3
    std::vector<TimeSeries> exterior_hardy3;  // int_{|x|>R} u^2/|x|^3
    std::vector<TimeSeries> interior_std;     // E(t; B(R)) standard density
    std::vector<TimeSeries> exterior_std;     // E(t; |x|>R)
};

MorawetzRun run_morawetz(const FieldState& init, const SolverConfig& cfg, double t_back,
                         std::vector<double> radii);

MorawetzReport morawetz_check(const MorawetzRun& run, double R, double T1, double T2);
RetardedReport retarded_energy_check(const MorawetzRun& run, double R, double T);

TailDecayReport tail_decay_check(const Trajectory& traj, double kappa,
                                 std::span<const double> r_list);

// E(t; B(0, t - c t^{1-kappa_0})) with the unnormalized density of the
// interior-decay proposition, one value per recorded state.
TimeSeries interior_energy_series(const Trajectory& traj, double c);

// ||(u-v, u_t-v_t)||^2 restricted to r in [r_lo, r_hi].
double energy_distance_sq(const RadialGrid& g, const PhysicalState& A, const PhysicalState& B,
                          double r_lo, double r_hi);

} // namespace wavelab

#endif
