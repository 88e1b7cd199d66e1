#include "wavelab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wavelab {

namespace {

// |w|^{p-1} w with fast paths for the common integer powers
inline double odd_power(double w, double p) {
    if (p == 3.0) return w * w * w;
    if (p == 2.0) return std::abs(w) * w;
    return std::pow(std::abs(w), p - 1.0) * w;
}

inline double abs_power(double w, double pp1) {
    if (pp1 == 4.0) { double w2 = w * w; return w2 * w2; }
    if (pp1 == 3.0) { double a = std::abs(w); return a * a * a; }
    return std::pow(std::abs(w), pp1);
}

struct Coeffs {
    std::vector<double> V;   // discrete inverse-square potential at the nodes
    std::vector<double> NW;  // r^{-(d-1)(p-1)/2}
    double lambda_a = 0.0;   // lambda_d + a_eff
};

Coeffs make_coeffs(const SolverConfig& cfg) {
    const auto& g = cfg.grid;
    const int d = cfg.params.d;
    const double a_eff = cfg.potential_on ? cfg.params.a : 0.0;
    const double lam = 0.25 * (d - 1) * (d - 3) + a_eff;
    Coeffs c;
    c.lambda_a = lam;
    c.V.assign(g.nodes(), 0.0);
    c.NW.assign(g.nodes(), 0.0);
    const double npow = -0.5 * (d - 1) * (cfg.params.p - 1.0);
    for (int j = 1; j <= g.n; ++j) {
        const double r = g.r(j);
        c.V[j] = lam / (r * r);
        c.NW[j] = std::pow(r, npow);
    }
    return c;
}

const Coeffs& get_coeffs(const SolverConfig& cfg) {
    struct Key {
        int d, n;
        double p, a, dr;
        bool pot;
        bool operator==(const Key&) const = default;
    };
    static thread_local Coeffs coeffs;
    static thread_local Key cached{0, 0, 0, 0, 0, false};
    const Key key{cfg.params.d, cfg.grid.n, cfg.params.p, cfg.params.a,
                  cfg.grid.dr, cfg.potential_on};
    if (!(key == cached)) {
        coeffs = make_coeffs(cfg);
        cached = key;
    }
    return coeffs;
}

} // namespace

const FieldState& Trajectory::state_at(double t) const {
    if (states.empty()) throw Error("trajectory holds no states");
    const FieldState* best = &states.front();
    double err = std::abs(best->t - t);
    for (const auto& s : states) {
        const double e = std::abs(s.t - t);
        if (e < err) { err = e; best = &s; }
    }
    return *best;
}

bool Trajectory::has_state_at(double t, double tol) const {
    for (const auto& s : states)
        if (std::abs(s.t - t) <= tol) return true;
    return false;
}

double time_step(const SolverConfig& cfg) {
    const double dr = cfg.grid.dr;
    const int d = cfg.params.d;
    const double a_eff = cfg.potential_on ? cfg.params.a : 0.0;
    const double lam = std::max(0.25 * (d - 1) * (d - 3) + a_eff, 0.0);
    const double dt_max = std::min(cfg.cfl * dr, 0.5 * dr / std::sqrt(1.0 + lam));
    const long m = static_cast<long>(std::ceil(cfg.dt_snap / dt_max - 1e-12));
    return cfg.dt_snap / static_cast<double>(m);
}

FieldState from_physical_samples(std::span<const double> u0, std::span<const double> u1,
                                 const SolverConfig& cfg) {
    const auto& g = cfg.grid;
    FieldState s;
    s.t = 0.0;
    s.w.assign(g.nodes(), 0.0);
    s.wt.assign(g.nodes(), 0.0);
    const double e = 0.5 * (g.d - 1);
    for (int j = 1; j < g.n; ++j) {
        const double rw = std::pow(g.r(j), e);
        s.w[j] = rw * u0[j];
        s.wt[j] = rw * u1[j];
    }
    return s;
}

FieldState from_physical(const InitialData& data, const SolverConfig& cfg) {
    const auto& g = cfg.grid;
    std::vector<double> u0(g.nodes()), u1(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        u0[j] = data.u0(g.r(j));
        u1[j] = data.u1(g.r(j));
    }
    return from_physical_samples(u0, u1, cfg);
}

PhysicalState to_physical(const FieldState& s, const RadialGrid& g) {
    PhysicalState p;
    p.t = s.t;
    const int n = g.n;
    p.u.assign(n + 1, 0.0);
    p.ur.assign(n + 1, 0.0);
    p.ut.assign(n + 1, 0.0);
    const double e = 0.5 * (g.d - 1);
    const double dr = g.dr;
    for (int j = 1; j <= n; ++j) {
        const double rinv = std::pow(g.r(j), -e);
        const double wr = (j < n) ? (s.w[j + 1] - s.w[j - 1]) / (2.0 * dr)
                                  : (s.w[n] - s.w[n - 1]) / dr;
        p.u[j] = s.w[j] * rinv;
        p.ut[j] = s.wt[j] * rinv;
        p.ur[j] = (wr - e * s.w[j] / g.r(j)) * rinv;
    }
    // radial smoothness: u is even in r, u_r(0) = 0
    p.u[0] = (4.0 * p.u[1] - p.u[2]) / 3.0;
    p.ut[0] = (4.0 * p.ut[1] - p.ut[2]) / 3.0;
    p.ur[0] = 0.0;
    return p;
}

void rhs(const FieldState& s, const SolverConfig& cfg,
         std::vector<double>& dw, std::vector<double>& dwt) {
    const Coeffs& coeffs = get_coeffs(cfg);
    const auto& g = cfg.grid;
    const int n = g.n;
    const double idr2 = 1.0 / (g.dr * g.dr);
    const double p = cfg.params.p;
    const bool nl = cfg.nonlinearity_on;
    dw.assign(n + 1, 0.0);
    dwt.assign(n + 1, 0.0);
    const double* w = s.w.data();
    for (int j = 1; j < n; ++j) {
        dw[j] = s.wt[j];
        double acc = (w[j + 1] - 2.0 * w[j] + w[j - 1]) * idr2 - coeffs.V[j] * w[j];
        if (nl) acc -= coeffs.NW[j] * odd_power(w[j], p);
        dwt[j] = acc;
    }
    if (cfg.forcing) {
        for (int j = 1; j < n; ++j) dwt[j] += cfg.forcing(g.r(j), s.t);
    }
}

double discrete_energy(const FieldState& s, const SolverConfig& cfg) {
    const Coeffs& coeffs = get_coeffs(cfg);
    const auto& g = cfg.grid;
    const int d = cfg.params.d, n = g.n;
    const double p = cfg.params.p;
    const double idr = 1.0 / g.dr;
    double quad = 0.0, pot = 0.0, kin = 0.0, nl = 0.0;
    for (int j = 0; j < n; ++j) {
        const double dwj = (s.w[j + 1] - s.w[j]) * idr;
        quad += dwj * dwj;
    }
    for (int j = 1; j < n; ++j) {
        kin += s.wt[j] * s.wt[j];
        pot += coeffs.V[j] * s.w[j] * s.w[j];
        if (cfg.nonlinearity_on) nl += coeffs.NW[j] * abs_power(s.w[j], p + 1.0);
    }
    const double dr = g.dr;
    return sphere_area(d) * dr * (0.5 * kin + 0.5 * quad + 0.5 * pot + nl / (p + 1.0));
}

FieldState step(const FieldState& s, double dt, const SolverConfig& cfg) {
    const int n = cfg.grid.n;
    static thread_local std::vector<double> k1w, k1t, k2w, k2t, k3w, k3t, k4w, k4t;
    FieldState tmp = s, out = s;
    out.t = s.t + dt;

    const double e_before = discrete_energy(s, cfg);

    rhs(s, cfg, k1w, k1t);
    for (int j = 1; j < n; ++j) {
        tmp.w[j] = s.w[j] + 0.5 * dt * k1w[j];
        tmp.wt[j] = s.wt[j] + 0.5 * dt * k1t[j];
    }
    tmp.t = s.t + 0.5 * dt;
    rhs(tmp, cfg, k2w, k2t);
    for (int j = 1; j < n; ++j) {
        tmp.w[j] = s.w[j] + 0.5 * dt * k2w[j];
        tmp.wt[j] = s.wt[j] + 0.5 * dt * k2t[j];
    }
    rhs(tmp, cfg, k3w, k3t);
    for (int j = 1; j < n; ++j) {
        tmp.w[j] = s.w[j] + dt * k3w[j];
        tmp.wt[j] = s.wt[j] + dt * k3t[j];
    }
    tmp.t = s.t + dt;
    rhs(tmp, cfg, k4w, k4t);
    for (int j = 1; j < n; ++j) {
        out.w[j] = s.w[j] + dt / 6.0 * (k1w[j] + 2.0 * k2w[j] + 2.0 * k3w[j] + k4w[j]);
        out.wt[j] = s.wt[j] + dt / 6.0 * (k1t[j] + 2.0 * k2t[j] + 2.0 * k3t[j] + k4t[j]);
    }
    out.w[0] = out.wt[0] = out.w[n] = out.wt[n] = 0.0;

    const double e_after = discrete_energy(out, cfg);
    const double floor = 1e-14 * (1.0 + std::abs(e_before));
    if (e_before > floor && e_after > 1.1 * e_before) {
        std::ostringstream os;
        os << "discrete energy grew by " << (e_after / e_before - 1.0) * 100.0
           << "% in one step at t=" << out.t;
        throw StabilityViolation(out.t, e_after / e_before, os.str());
    }
    return out;
}

namespace {

void record_cone_samples(const FieldState& s, const SolverConfig& cfg,
                         const std::vector<double>& etas,
                         std::vector<std::vector<ConeSample>>& out) {
    const auto& g = cfg.grid;
    const double e = 0.5 * (g.d - 1);
    for (size_t i = 0; i < etas.size(); ++i) {
        const double r = s.t - etas[i];
        if (r < 0.5 * g.dr || r > g.r_max() - 2.0 * g.dr) continue;
        ConeSample cs;
        cs.t = s.t;
        cs.r = r;
        cs.w = interpolate(g, s.w, r);
        cs.wt = interpolate(g, s.wt, r);
        cs.wr = interpolate_derivative(g, s.w, r);
        const double rinv = std::pow(r, -e);
        cs.u = cs.w * rinv;
        cs.ut = cs.wt * rinv;
        cs.ur = (cs.wr - e * cs.w / r) * rinv;
        out[i].push_back(cs);
    }
}

void record_line_samples(const FieldState& s, const SolverConfig& cfg,
                         const std::vector<CharLineSpec>& lines,
                         std::vector<std::vector<CharSample>>& out) {
    const auto& g = cfg.grid;
    for (size_t i = 0; i < lines.size(); ++i) {
        const double r = (lines[i].kind == CharLineSpec::outgoing)
                             ? s.t - lines[i].offset
                             : lines[i].offset - s.t;
        if (r < 0.5 * g.dr || r > g.r_max() - 2.0 * g.dr) continue;
        CharSample c;
        c.t = s.t;
        c.r = r;
        const double wt = interpolate(g, s.wt, r);
        const double wr = interpolate_derivative(g, s.w, r);
        c.in_value = wt + wr;
        c.out_value = wt - wr;
        out[i].push_back(c);
    }
}

} // namespace

Trajectory evolve(const FieldState& init, const SolverConfig& cfg, const ObserverSet& obs) {
    const auto& g = cfg.grid;
    Trajectory traj;
    traj.config = cfg;
    traj.derived = derive(validate(cfg.params.d, cfg.params.p, cfg.params.a));
    traj.dt = time_step(cfg);
    traj.cone_etas = obs.cone_etas;
    traj.cone_samples.assign(obs.cone_etas.size(), {});
    traj.lines = obs.lines;
    traj.line_samples.assign(obs.lines.size(), {});

    const long steps = std::lround(cfg.t_final / traj.dt);
    if (std::abs(steps * traj.dt - cfg.t_final) > 1e-9)
        throw Error("t_final must be a multiple of dt_snap");
    long stride = std::lround(cfg.record_interval / traj.dt);
    if (stride < 1) stride = 1;

    FieldState s = init;
    s.w[0] = s.wt[0] = 0.0;
    s.w[g.n] = s.wt[g.n] = 0.0;

    auto observe = [&](const FieldState& st, long k) {
        traj.energy.push_back({st.t, discrete_energy(st, cfg)});
        record_cone_samples(st, cfg, traj.cone_etas, traj.cone_samples);
        record_line_samples(st, cfg, traj.lines, traj.line_samples);
        for (auto* o : obs.extra) o->on_step(st, cfg);
        if (k % stride == 0 || k == steps) traj.states.push_back(st);
    };

    observe(s, 0);
    for (long k = 1; k <= steps; ++k) {
        s = step(s, traj.dt, cfg);
        s.t = k * traj.dt;  // avoid accumulated roundoff in t
        observe(s, k);
    }
    return traj;
}

Trajectory evolve_two_sided(const FieldState& init, const SolverConfig& cfg, double t_back,
                            const ObserverSet& obs) {
    // backward leg: time reversal maps u(x,t) -> u(x,-t), flipping u_t
    SolverConfig back_cfg = cfg;
    back_cfg.t_final = t_back;
    FieldState binit = init;
    for (auto& v : binit.wt) v = -v;
    Trajectory back = evolve(binit, back_cfg, ObserverSet{{}, {}, obs.extra});

    Trajectory fwd = evolve(init, cfg, obs);

    Trajectory traj;
    traj.config = fwd.config;
    traj.derived = fwd.derived;
    traj.dt = fwd.dt;
    traj.cone_etas = fwd.cone_etas;
    traj.cone_samples = fwd.cone_samples;
    traj.lines = fwd.lines;
    traj.line_samples = fwd.line_samples;

    for (auto it = back.states.rbegin(); it != back.states.rend(); ++it) {
        if (it->t == 0.0) continue;
        FieldState s = *it;
        s.t = -it->t;
        for (auto& v : s.wt) v = -v;
        traj.states.push_back(std::move(s));
    }
    for (auto& s : fwd.states) traj.states.push_back(std::move(s));
    for (auto it = back.energy.rbegin(); it != back.energy.rend(); ++it) {
        if (it->t == 0.0) continue;
        traj.energy.push_back({-it->t, it->discrete});
    }
    for (auto& e : fwd.energy) traj.energy.push_back(e);
    return traj;
}

} // namespace wavelab
