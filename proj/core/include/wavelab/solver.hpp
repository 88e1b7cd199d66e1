#ifndef WAVELAB_SOLVER_HPP
#define WAVELAB_SOLVER_HPP

#include <functional>
#include <optional>
#include <vector>

#include "wavelab/exponents.hpp"
#include "wavelab/initial_data.hpp"
#include "wavelab/mesh.hpp"

namespace wavelab {

// Reduced field w = r^{(d-1)/2} u on the grid nodes. Dirichlet at both ends:
// w and w_t vanish at j = 0 and j = n for all times.
struct FieldState {
    double t = 0.0;
    std::vector<double> w, wt;
};

struct SolverConfig {
    ModelParams params{3, 3.0, 0.0};
    RadialGrid grid;
    double cfl = 0.25;
    bool potential_on = true;     // false means a = 0; the centrifugal lambda_d/r^2 stays
    bool nonlinearity_on = true;
    double t_final = 0.0;
    double dt_snap = 0.5;         // dt divides this interval exactly
    double record_interval = 0.5; // snapshot cadence; multiple of dt_snap
    // optional source term added to dw_t/dt, for manufactured-solution tests
    std::function<double(double r, double t)> forcing;
};

// Characteristic line request: outgoing r = t - offset, incoming r = offset - t.
struct CharLineSpec {
    enum Kind { outgoing, incoming } kind = outgoing;
    double offset = 0.0;
};

struct ConeSample {
    double t, r;
    double u, ur, ut;   // physical variables on the cone
    double w, wt, wr;   // reduced variables
};

struct CharSample {
    double t, r;
    double in_value;   // w_t + w_r
    double out_value;  // w_t - w_r
};

struct EnergySample {
    double t;
    double discrete;   // conserved energy of the semi-discrete flow
};

class Observer {
public:
    virtual ~Observer() = default;
    virtual void on_step(const FieldState& s, const SolverConfig& cfg) = 0;
};

struct ObserverSet {
    std::vector<double> cone_etas;
    std::vector<CharLineSpec> lines;
    std::vector<Observer*> extra;
};

struct Trajectory {
    SolverConfig config;
    DerivedConstants derived;
    double dt = 0.0;
    std::vector<FieldState> states;                    // strictly increasing t
    std::vector<double> cone_etas;
    std::vector<std::vector<ConeSample>> cone_samples; // parallel to cone_etas
    std::vector<CharLineSpec> lines;
    std::vector<std::vector<CharSample>> line_samples; // parallel to lines
    std::vector<EnergySample> energy;                  // every step

    const FieldState& state_at(double t) const;        // nearest recorded snapshot
    bool has_state_at(double t, double tol = 1e-9) const;
};

// Admissible fixed step: CFL bound plus the inverse-square stiffness guard,
// then rounded down so an integer number of steps spans dt_snap.
double time_step(const SolverConfig& cfg);

FieldState from_physical(const InitialData& data, const SolverConfig& cfg);
FieldState from_physical_samples(std::span<const double> u0, std::span<const double> u1,
                                 const SolverConfig& cfg);
PhysicalState to_physical(const FieldState& s, const RadialGrid& g);

// Right-hand side of the first-order system (dw/dt, dwt/dt).
void rhs(const FieldState& s, const SolverConfig& cfg,
         std::vector<double>& dw, std::vector<double>& dwt);

// One classical RK4 update. Throws StabilityViolation when the discrete
// energy grows by more than 10% across the step.
FieldState step(const FieldState& s, double dt, const SolverConfig& cfg);

// Conserved energy of the semi-discrete system (forward-difference gradient
// sum); equals the continuum energy to second order in dr.
double discrete_energy(const FieldState& s, const SolverConfig& cfg);

Trajectory evolve(const FieldState& init, const SolverConfig& cfg, const ObserverSet& obs = {});

// Evolve both time directions (the equation is time reversible) and return a
// single trajectory spanning [-t_back, t_final]. Cone/characteristic samples
// are collected on the forward leg only.
Trajectory evolve_two_sided(const FieldState& init, const SolverConfig& cfg, double t_back,
                            const ObserverSet& obs = {});

// Closed-form d=3 free-wave oracle in the reduced variable w = r u.
class DalembertOracle {
public:
    explicit DalembertOracle(InitialData data);
    void eval(double r, double t, double& u, double& ur, double& ut) const;
    double w(double r, double t) const;
    double radiation_field(double eta) const;  // g_+(eta) = -(psi'(eta) + chi(eta))/2
private:
    InitialData data_;
    double psi(double s) const;    // odd extension s*u0(|s|)
    double dpsi(double s) const;
    double chi(double s) const;    // odd extension s*u1(|s|)
    double Phi(double s) const;    // even primitive of chi
};

} // namespace wavelab

#endif
