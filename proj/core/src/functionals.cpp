#include "wavelab/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace wavelab {

namespace {

struct Medium {
    int d;
    double p;
    double a_eff;    // 0 when the potential flag is off
    bool nonlinear;
};

Medium medium_of(const SolverConfig& cfg) {
    return {cfg.params.d, cfg.params.p, cfg.potential_on ? cfg.params.a : 0.0,
            cfg.nonlinearity_on};
}

inline double abs_pow(double u, double q) {
    if (q == 4.0) { double u2 = u * u; return u2 * u2; }
    if (q == 3.0) { double a = std::abs(u); return a * a * a; }
    return std::pow(std::abs(u), q);
}

// Cumulative trapezoid on the node lattice: S[j] = int_0^{r_j} g dr.
struct Cumtrapz {
    double dr = 0;
    std::vector<double> S;
    void build(std::span<const double> g, double dr_, bool origin_rule = false) {
        dr = dr_;
        S.assign(g.size(), 0.0);
        if (g.size() < 2) return;
        S[1] = origin_rule ? g[1] * dr : 0.5 * (g[0] + g[1]) * dr;
        for (size_t j = 1; j + 1 < g.size(); ++j)
            S[j + 1] = S[j] + 0.5 * (g[j] + g[j + 1]) * dr;
        g_ = g;
    }
    double at(double R) const {
        const double x = R / dr;
        const auto j = static_cast<size_t>(x);
        if (j + 1 >= S.size()) return S.back();
        const double s = x - j;
        // partial cell: trapezoid between node j and the interpolated cut
        const double gc = (1.0 - s) * g_[j] + s * g_[j + 1];
        return S[j] + 0.5 * (g_[j] + gc) * (s * dr);
    }
    double total() const { return S.back(); }
private:
    std::span<const double> g_;
};

void region_bounds(const RadialGrid& g, Region region, double& ra, double& rb) {
    switch (region.kind) {
        case Region::ball: ra = 0.0; rb = region.r2; break;
        case Region::annulus: ra = region.r1; rb = region.r2; break;
        default: ra = 0.0; rb = g.r_max(); break;
    }
    if (ra < 0.0 || rb > g.r_max() + 1e-12 || ra > rb)
        throw RangeOutsideGrid("energy region outside grid");
}

} // namespace

double TimeSeries::integrate(double t1, double t2) const {
    if (t.empty() || t1 >= t2) return 0.0;
    double sum = 0.0;
    for (size_t k = 0; k + 1 < t.size(); ++k) {
        const double a = std::max(t[k], t1), b = std::min(t[k + 1], t2);
        if (a >= b) continue;
        const double h = t[k + 1] - t[k];
        auto value = [&](double tq) {
            const double s = (tq - t[k]) / h;
            return (1.0 - s) * v[k] + s * v[k + 1];
        };
        sum += 0.5 * (value(a) + value(b)) * (b - a);
    }
    return sum;
}

double TimeSeries::at(double tq) const {
    if (t.empty()) throw Error("empty time series");
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    if (it == t.begin()) return v.front();
    if (it == t.end()) return v.back();
    const size_t k = it - t.begin();
    const double s = (tq - t[k - 1]) / (t[k] - t[k - 1]);
    return (1.0 - s) * v[k - 1] + s * v[k];
}

EnergyBreakdown energy(const SolverConfig& cfg, const PhysicalState& s, Region region) {
    const auto& g = cfg.grid;
    const Medium m = medium_of(cfg);
    double ra, rb;
    region_bounds(g, region, ra, rb);

    EnergyBreakdown out;
    out.region = region;
    std::vector<double> f(g.nodes());
    for (int j = 0; j <= g.n; ++j) f[j] = s.ut[j] * s.ut[j];
    out.kinetic = 0.5 * shell_integral(g, f, ra, rb);
    for (int j = 0; j <= g.n; ++j) f[j] = s.ur[j] * s.ur[j];
    out.gradient = 0.5 * shell_integral(g, f, ra, rb);
    out.hardy = 0.5 * m.a_eff * hardy_integral(g, s.u, ra, rb);
    if (m.nonlinear) {
        for (int j = 0; j <= g.n; ++j) f[j] = abs_pow(s.u[j], m.p + 1.0);
        out.nonlinear = shell_integral(g, f, ra, rb) / (m.p + 1.0);
    }
    out.total = out.kinetic + out.gradient + out.hardy + out.nonlinear;
    return out;
}

double weighted_energy(const SolverConfig& cfg, const PhysicalState& s, double kappa) {
    return tail_energy(cfg, s, kappa, 0.0);
}

double tail_energy(const SolverConfig& cfg, const PhysicalState& s, double kappa, double r) {
    const auto& g = cfg.grid;
    const Medium m = medium_of(cfg);
    std::vector<double> f(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        const double weight = std::pow(g.r(j), kappa) + 1.0;
        double density = s.ur[j] * s.ur[j] + s.ut[j] * s.ut[j] + abs_pow(s.u[j], m.p + 1.0);
        f[j] = weight * density;
    }
    return shell_integral(g, f, std::min(0.5 * r, g.r_max()), g.r_max());
}

FluxReport cone_flux(const Trajectory& traj, double eta, double t1, double t2) {
    const auto& cfg = traj.config;
    const auto& g = cfg.grid;
    const Medium m = medium_of(cfg);
    size_t idx = traj.cone_etas.size();
    for (size_t i = 0; i < traj.cone_etas.size(); ++i)
        if (std::abs(traj.cone_etas[i] - eta) < 1e-9) { idx = i; break; }
    if (idx == traj.cone_etas.size())
        throw ConeNotSampled("cone eta not sampled by this trajectory");
    const auto& samples = traj.cone_samples[idx];
    if (samples.size() < 2) throw ConeNotSampled("cone has too few samples");

    const int d = m.d;
    const double cd = sphere_area(d);
    auto integrand_flux = [&](const ConeSample& c) {
        const double rw = std::pow(c.r, d - 1);
        const double s = c.ur + c.ut;
        double val = 0.5 * s * s * rw + 0.5 * m.a_eff * c.u * c.u * std::pow(c.r, d - 3);
        if (m.nonlinear) val += abs_pow(c.u, m.p + 1.0) * rw / (m.p + 1.0);
        return val;
    };
    auto integrand_out = [&](const ConeSample& c) {
        const double s = c.ur + c.ut;
        return s * s * std::pow(c.r, d - 1);
    };
    auto integrand_hardy = [&](const ConeSample& c) {
        return c.u * c.u * std::pow(c.r, d - 3);
    };
    auto integrand_full = [&](const ConeSample& c) {
        double val = integrand_out(c) + integrand_hardy(c);
        if (m.nonlinear) val += abs_pow(c.u, m.p + 1.0) * std::pow(c.r, d - 1);
        return val;
    };

    FluxReport rep;
    rep.cone = ConeSection{eta, t1, t2};
    double flux = 0, out_sq = 0, hardy_sq = 0, full = 0;
    for (size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& A = samples[k];
        const auto& B = samples[k + 1];
        const double h = B.t - A.t;
        if (A.t >= t1 - 1e-12 && B.t <= t2 + 1e-12)
            flux += 0.5 * (integrand_flux(A) + integrand_flux(B)) * h;
        out_sq += 0.5 * (integrand_out(A) + integrand_out(B)) * h;
        hardy_sq += 0.5 * (integrand_hardy(A) + integrand_hardy(B)) * h;
        full += 0.5 * (integrand_full(A) + integrand_full(B)) * h;
    }
    rep.flux_value = cd * flux;
    const double sq2cd = std::sqrt(2.0) * cd;
    rep.outgoing_sq = sq2cd * out_sq;
    rep.hardy_sq = sq2cd * hardy_sq;
    rep.hardy_slack = rep.outgoing_sq - 0.25 * (d - 2) * (d - 2) * rep.hardy_sq;
    rep.full_cone_flux = sq2cd * full;

    if (!traj.has_state_at(t1) || !traj.has_state_at(t2))
        throw Error("cone flux endpoints must coincide with recorded states");
    const auto E1 = energy(cfg, to_physical(traj.state_at(t1), g), Region::make_ball(t1 - eta));
    const auto E2 = energy(cfg, to_physical(traj.state_at(t2), g), Region::make_ball(t2 - eta));
    rep.energy_delta = E2.total - E1.total;
    rep.residual = std::abs(rep.flux_value - rep.energy_delta);
    rep.total_energy =
        energy(cfg, to_physical(traj.states.front(), g), Region::make_all()).total;
    rep.flux_over_energy = rep.full_cone_flux / std::abs(rep.total_energy);
    return rep;
}

HardyReport hardy_local(const RadialGrid& g, const PhysicalState& s, double R, double a) {
    const int d = g.d;
    const double hc = 0.25 * (d - 2) * (d - 2);
    if (!(a > -hc)) throw PotentialBelowThreshold(a, -hc, "a must exceed -(d-2)^2/4");
    if (R <= 0.0 || R > g.r_max()) throw RangeOutsideGrid("hardy radius outside grid");
    const double sigma = 0.5 * (d - 2) - std::sqrt(hc + a);
    const double cd = sphere_area(d);

    std::vector<double> h(g.nodes()), q(g.nodes()), rough(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        const double r = g.r(j);
        const double rw = std::pow(r, d - 1), rh = std::pow(r, d - 3);
        h[j] = s.ur[j] * s.ur[j] * rw + a * s.u[j] * s.u[j] * rh;
        const double packed = s.ur[j] * r + sigma * s.u[j];
        q[j] = packed * packed * rh;
        rough[j] = s.ur[j] * s.ur[j] * rw + s.u[j] * s.u[j] * rh;
    }
    for (auto* arr : {&h, &q, &rough})
        if (!std::isfinite((*arr)[0])) (*arr)[0] = 0.0;

    const double uR = interpolate(g, s.u, R);
    const double surface = cd * uR * uR * std::pow(R, d - 2);  // int_{|x|=R} u^2/|x| dS

    HardyReport rep;
    rep.R = R;
    rep.boundary_term = sigma * surface;
    rep.f_R = cd * integrate_power_origin(g, h, R) + rep.boundary_term;
    rep.identity_value = cd * integrate_power_origin(g, q, R);
    rep.corollary_lhs = rep.f_R - rep.boundary_term;
    rep.corollary_bound = -sigma * surface;

    // strengthened local bound with explicit constants: take the form with
    // a replaced by a - eps, eps = (a + hc)/2
    const double eps = 0.5 * (a + hc);
    const double sigma_eps = 0.5 * (d - 2) - std::sqrt(hc + a - eps);
    const double C1 = 1.0 + (1.0 + std::abs(a)) / eps;
    const double C2 = (1.0 + std::abs(a)) * (sigma_eps - sigma) / eps + std::abs(sigma);
    rep.eq2_lhs = cd * integrate_power_origin(g, rough, R);
    rep.eq2_bound = C1 * rep.f_R + C2 * surface;
    rep.scale = rep.eq2_lhs + surface;
    return rep;
}

double virial(const SolverConfig& cfg, const PhysicalState& s, double R) {
    const auto& g = cfg.grid;
    if (R <= 0.0 || R > g.r_max()) throw RangeOutsideGrid("virial radius outside grid");
    const int d = g.d;
    const double e = 0.5 * (d - 1);
    std::vector<double> inner(g.nodes()), outer(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        const double r = g.r(j);
        const double rw = std::pow(r, d - 1);
        inner[j] = s.ut[j] * (r * s.ur[j] + e * s.u[j]) * rw;
        outer[j] = (j == 0) ? 0.0 : s.ut[j] * (s.ur[j] + e * s.u[j] / r) * rw;
    }
    Cumtrapz Si, So;
    Si.build(inner, g.dr);
    So.build(outer, g.dr);
    const double cd = sphere_area(d);
    return cd * (Si.at(R) + R * (So.total() - So.at(R)));
}

Envelopes pointwise_envelopes(const RadialGrid& g, const PhysicalState& s, double p) {
    const Norms nm = norms(g, s, p);
    if (nm.h1_dot <= 0.0 || nm.lp1 <= 0.0)
        throw ZeroField("pointwise envelopes need a nonzero field");
    const int d = g.d;
    double sup1 = 0.0, sup2 = 0.0;
    const double e1 = 0.5 * (d - 2), e2 = 2.0 * (d - 1) / (p + 3.0);
    for (int j = 1; j <= g.n; ++j) {
        const double r = g.r(j), au = std::abs(s.u[j]);
        sup1 = std::max(sup1, std::pow(r, e1) * au);
        sup2 = std::max(sup2, std::pow(r, e2) * au);
    }
    Envelopes env;
    env.radial_sobolev = sup1 / std::sqrt(nm.h1_dot);
    env.decay_envelope = sup2 / (std::pow(nm.h1_dot, 1.0 / (p + 3.0)) *
                                 std::pow(nm.lp1, 1.0 / (p + 3.0)));
    return env;
}

namespace {

// Accumulates the per-step space-time series for the Morawetz machinery.
class MorawetzAccumulator : public Observer {
public:
    MorawetzAccumulator(std::vector<double> radii, const SolverConfig& cfg)
        : radii_(std::move(radii)), m_(medium_of(cfg)) {
        const auto& g = cfg.grid;
        rw_.resize(g.nodes());
        rh_.resize(g.nodes());
        rq_.resize(g.nodes());
        rc_.resize(g.nodes());
        rinv_e_.resize(g.nodes());
        const double e = 0.5 * (g.d - 1);
        for (int j = 1; j <= g.n; ++j) {
            const double r = g.r(j);
            rw_[j] = std::pow(r, g.d - 1);
            rh_[j] = std::pow(r, g.d - 3);
            rq_[j] = std::pow(r, g.d - 2);
            rc_[j] = std::pow(r, g.d - 4);
            rinv_e_[j] = std::pow(r, -e);
        }
        rw_[0] = 0.0;
        rh_[0] = (g.d == 3) ? 1.0 : 0.0;
        rq_[0] = 0.0;
        rc_[0] = 0.0;
        series_.assign(6, std::vector<TimeSeries>(radii_.size()));
    }

    void on_step(const FieldState& s, const SolverConfig& cfg) override {
        const auto& g = cfg.grid;
        const int n = g.n, d = g.d;
        const double e = 0.5 * (d - 1);
        const double dr = g.dr;
        A_.assign(n + 1, 0.0);
        B_.assign(n + 1, 0.0);
        C_.assign(n + 1, 0.0);
        D_.assign(n + 1, 0.0);
        E_.assign(n + 1, 0.0);
        u_.assign(n + 1, 0.0);
        for (int j = 1; j <= n; ++j) {
            const double r = g.r(j);
            const double wr = (j < n) ? (s.w[j + 1] - s.w[j - 1]) / (2.0 * dr)
                                      : (s.w[n] - s.w[n - 1]) / dr;
            const double u = s.w[j] * rinv_e_[j];
            const double ut = s.wt[j] * rinv_e_[j];
            const double ur = (wr - e * s.w[j] / r) * rinv_e_[j];
            u_[j] = u;
            A_[j] = (ur * ur + ut * ut) * rw_[j];
            B_[j] = u * u * rh_[j];
            if (m_.nonlinear) {
                const double up = abs_pow(u, m_.p + 1.0);
                C_[j] = up * rw_[j];
                D_[j] = up * rq_[j];
            }
            E_[j] = u * u * rc_[j];
        }
        u_[0] = (4.0 * u_[1] - u_[2]) / 3.0;
        B_[0] = u_[0] * u_[0] * rh_[0];

        SA_.build(A_, dr);
        SB_.build(B_, dr, /*origin_rule=*/true);
        SC_.build(C_, dr);
        SD_.build(D_, dr);
        SE_.build(E_, dr);

        const double cd = sphere_area(d);
        const double a = m_.a_eff;
        const double lam = 0.25 * (d - 1) * (d - 3);
        const double cp = ((d - 1) * (m_.p - 1.0) - 2.0) / (m_.p + 1.0);
        const double cq = (d - 1) * (m_.p - 1.0) / (2.0 * (m_.p + 1.0));
        for (size_t i = 0; i < radii_.size(); ++i) {
            const double R = radii_[i];
            const double uR = interpolate(g, u_, R);
            const double surf = cd * std::pow(R, d - 1) * uR * uR;
            const double Ain = SA_.at(R), Bin = SB_.at(R), Cin = SC_.at(R);
            const double line1 = cd * (Ain + a * Bin + cp * Cin);
            const double extmix = cd * (cq * (SD_.total() - SD_.at(R)) +
                                        (a + lam) * (SE_.total() - SE_.at(R)));
            const double exth3 = cd * (SE_.total() - SE_.at(R));
            const double istd = cd * (0.5 * Ain + 0.5 * a * Bin + Cin / (m_.p + 1.0));
            const double estd = cd * (0.5 * (SA_.total() - Ain) + 0.5 * a * (SB_.total() - Bin) +
                                      (SC_.total() - Cin) / (m_.p + 1.0));
            push(0, i, s.t, line1);
            push(1, i, s.t, surf);
            push(2, i, s.t, extmix);
            push(3, i, s.t, exth3);
            push(4, i, s.t, istd);
            push(5, i, s.t, estd);
        }
    }

    // consume the recorded series; negate = backward leg (t -> -t)
    std::vector<std::vector<TimeSeries>> take(bool negate) {
        auto out = std::move(series_);
        if (negate) {
            for (auto& group : out)
                for (auto& ts : group) {
                    std::reverse(ts.t.begin(), ts.t.end());
                    std::reverse(ts.v.begin(), ts.v.end());
                    for (auto& tv : ts.t) tv = -tv;
                }
        }
        return out;
    }

private:
    void push(int which, size_t i, double t, double v) {
        series_[which][i].t.push_back(t);
        series_[which][i].v.push_back(v);
    }
    std::vector<double> radii_;
    Medium m_;
    std::vector<double> rw_, rh_, rq_, rc_, rinv_e_;
    std::vector<double> A_, B_, C_, D_, E_, u_;
    Cumtrapz SA_, SB_, SC_, SD_, SE_;
    std::vector<std::vector<TimeSeries>> series_;
};

TimeSeries merge_series(const TimeSeries& back, const TimeSeries& fwd) {
    TimeSeries out;
    for (size_t k = 0; k < back.t.size(); ++k) {
        if (back.t[k] == 0.0) continue;  // forward leg owns t = 0
        out.t.push_back(back.t[k]);
        out.v.push_back(back.v[k]);
    }
    out.t.insert(out.t.end(), fwd.t.begin(), fwd.t.end());
    out.v.insert(out.v.end(), fwd.v.begin(), fwd.v.end());
    return out;
}

} // namespace

MorawetzRun run_morawetz(const FieldState& init, const SolverConfig& cfg, double t_back,
                         std::vector<double> radii) {
    MorawetzRun run;
    run.radii = radii;

    MorawetzAccumulator accB(radii, cfg);
    SolverConfig bcfg = cfg;
    bcfg.t_final = t_back;
    FieldState binit = init;
    for (auto& v : binit.wt) v = -v;
    ObserverSet obsB;
    obsB.extra = {&accB};
    Trajectory back = evolve(binit, bcfg, obsB);

    MorawetzAccumulator accF(radii, cfg);
    ObserverSet obsF;
    obsF.extra = {&accF};
    Trajectory fwd = evolve(init, cfg, obsF);

    auto sb = accB.take(/*negate=*/true);
    auto sf = accF.take(false);
    auto merge_group = [&](int which) {
        std::vector<TimeSeries> out(radii.size());
        for (size_t i = 0; i < radii.size(); ++i)
            out[i] = merge_series(sb[which][i], sf[which][i]);
        return out;
    };
    run.line_density = merge_group(0);
    run.surface_u2 = merge_group(1);
    run.exterior_mixed = merge_group(2);
    run.exterior_hardy3 = merge_group(3);
    run.interior_std = merge_group(4);
    run.exterior_std = merge_group(5);

    // merged two-sided trajectory (states + energy series)
    run.traj.config = fwd.config;
    run.traj.derived = fwd.derived;
    run.traj.dt = fwd.dt;
    for (auto it = back.states.rbegin(); it != back.states.rend(); ++it) {
        if (it->t == 0.0) continue;
        FieldState s = *it;
        s.t = -it->t;
        for (auto& v : s.wt) v = -v;
        run.traj.states.push_back(std::move(s));
    }
    for (auto& s : fwd.states) run.traj.states.push_back(std::move(s));
    for (auto it = back.energy.rbegin(); it != back.energy.rend(); ++it) {
        if (it->t == 0.0) continue;
        run.traj.energy.push_back({-it->t, it->discrete});
    }
    for (auto& e : fwd.energy) run.traj.energy.push_back(e);
    return run;
}

namespace {

size_t radius_index(const MorawetzRun& run, double R) {
    for (size_t i = 0; i < run.radii.size(); ++i)
        if (std::abs(run.radii[i] - R) < 1e-12) return i;
    throw Error("radius not accumulated in this run");
}

} // namespace

MorawetzReport morawetz_check(const MorawetzRun& run, double R, double T1, double T2) {
    const auto& cfg = run.traj.config;
    const auto& dc = run.traj.derived;
    const Medium m = medium_of(cfg);
    const size_t i = radius_index(run, R);
    const int d = m.d;

    MorawetzReport rep;
    rep.R = R;
    rep.T1 = T1;
    rep.T2 = T2;
    rep.interior_term = run.line_density[i].integrate(T1, T2) / (2.0 * R);
    rep.surface_term = (d - 1) / (4.0 * R * R) * run.surface_u2[i].integrate(T1, T2);
    rep.exterior_term = run.exterior_mixed[i].integrate(T1, T2);

    const auto& g = cfg.grid;
    const auto s1 = to_physical(run.traj.state_at(T1), g);
    const auto s2 = to_physical(run.traj.state_at(T2), g);
    std::vector<double> f(g.nodes());
    auto l2_ball = [&](const PhysicalState& s) {
        for (int j = 0; j <= g.n; ++j) f[j] = s.u[j] * s.u[j];
        return shell_integral(g, f, 0.0, R);
    };
    const double mu_term = dc.mu_d + m.a_eff - 2.0 * dc.sigma;
    rep.endpoint_term = mu_term / (2.0 * R * R) * (l2_ball(s1) + l2_ball(s2));
    rep.lhs_total = rep.interior_term + rep.surface_term + rep.exterior_term + rep.endpoint_term;

    const double E0 =
        energy(cfg, to_physical(run.traj.state_at(0.0), g), Region::make_all()).total;
    const double tail1 = hardy_integral(g, s1.u, R, g.r_max());
    const double tail2 = hardy_integral(g, s2.u, R, g.r_max());
    rep.rhs = 2.0 * E0 + 0.5 * (-dc.lambda_d + std::abs(m.a_eff)) * (tail1 + tail2);
    rep.virial_T1 = virial(cfg, s1, R);
    rep.virial_T2 = virial(cfg, s2, R);
    rep.slack = rep.rhs - rep.lhs_total;
    rep.budget = 1e-4 * std::abs(E0);
    return rep;
}

RetardedReport retarded_energy_check(const MorawetzRun& run, double R, double T) {
    const auto& cfg = run.traj.config;
    const auto& dc = run.traj.derived;
    const Medium m = medium_of(cfg);
    const size_t i = radius_index(run, R);
    const auto& g = cfg.grid;

    RetardedReport rep;
    rep.R = R;
    rep.T = T;
    rep.lhs = run.interior_std[i].integrate(R, T);
    const double first = run.exterior_std[i].integrate(-R, R);
    const double second = run.exterior_hardy3[i].integrate(-R, T);
    const auto sA = to_physical(run.traj.state_at(-R), g);
    const auto sB = to_physical(run.traj.state_at(T), g);
    const double tails = hardy_integral(g, sA.u, R, g.r_max())
                       + hardy_integral(g, sB.u, R, g.r_max());
    rep.rhs = first + R * (std::abs(m.a_eff) - dc.lambda_d) * (second + 0.5 * tails);
    rep.slack = rep.rhs - rep.lhs;
    const double E0 = energy(cfg, to_physical(run.traj.state_at(0.0), g), Region::make_all()).total;
    rep.budget = 1e-4 * std::abs(E0);
    return rep;
}

TailDecayReport tail_decay_check(const Trajectory& traj, double kappa,
                                 std::span<const double> r_list) {
    const auto& cfg = traj.config;
    const auto& g = cfg.grid;
    const Medium m = medium_of(cfg);
    TailDecayReport rep;
    rep.kappa = kappa;

    // suffix weighted-energy of the initial data: E_{kappa,x} = S(x/2)
    const auto s0 = to_physical(traj.states.front(), g);
    std::vector<double> wdens(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        const double weight = std::pow(g.r(j), kappa) + 1.0;
        wdens[j] = weight * (s0.ur[j] * s0.ur[j] + s0.ut[j] * s0.ut[j] +
                             abs_pow(s0.u[j], m.p + 1.0)) * std::pow(g.r(j), g.d - 1);
    }
    Cumtrapz Sw;
    Sw.build(wdens, g.dr);
    const double cd = sphere_area(g.d);
    auto Ekr = [&](double x) {
        const double lo = std::min(std::max(0.5 * x, 0.0), g.r_max());
        return cd * (Sw.total() - Sw.at(lo));
    };
    const double Etot = Ekr(0.0);

    const double e2 = 2.0 * (g.d - 1) / (m.p + 3.0);
    const double ek = 2.0 * kappa / (m.p + 3.0);
    for (const auto& st : traj.states) {
        const auto ps = to_physical(st, g);
        std::vector<double> dens(g.nodes());
        for (int j = 0; j <= g.n; ++j) {
            const double rh = (j == 0) ? 0.0 : std::pow(g.r(j), g.d - 3);
            dens[j] = (ps.ur[j] * ps.ur[j] + ps.ut[j] * ps.ut[j] +
                       abs_pow(ps.u[j], m.p + 1.0)) * std::pow(g.r(j), g.d - 1)
                    + ps.u[j] * ps.u[j] * rh;
        }
        Cumtrapz Sd;
        Sd.build(dens, g.dr);
        for (double r : r_list) {
            const double lo = r + std::abs(st.t);
            TailDecayEntry e;
            e.r = r;
            e.t = st.t;
            e.exterior_energy = (lo >= g.r_max()) ? 0.0 : cd * (Sd.total() - Sd.at(lo));
            e.bound = std::pow(r, -kappa) * Ekr(r);
            e.ratio = (e.bound > 0.0) ? e.exterior_energy / e.bound : 0.0;
            rep.max_ratio = std::max(rep.max_ratio, e.ratio);
            rep.entries.push_back(e);
        }
        // pointwise decay ratio outside the light cone
        for (int j = 1; j <= g.n; ++j) {
            const double x = g.r(j) - std::abs(st.t);
            if (x < 0.5) continue;
            const double ek_x = Ekr(x);
            if (ek_x < 1e-13 * Etot) continue;
            const double ratio = std::abs(ps.u[j]) * std::pow(g.r(j), e2) * std::pow(x, ek)
                               / std::pow(ek_x, 2.0 / (m.p + 3.0));
            rep.max_pointwise_ratio = std::max(rep.max_pointwise_ratio, ratio);
        }
    }
    return rep;
}

TimeSeries interior_energy_series(const Trajectory& traj, double c) {
    const auto& cfg = traj.config;
    const auto& g = cfg.grid;
    const Medium m = medium_of(cfg);
    const double k0 = traj.derived.kappa_0;
    TimeSeries out;
    for (const auto& st : traj.states) {
        if (st.t <= 0.0) continue;
        const double rad = st.t - c * std::pow(st.t, 1.0 - k0);
        if (rad <= 0.0 || rad > g.r_max()) continue;
        const auto ps = to_physical(st, g);
        std::vector<double> f(g.nodes());
        for (int j = 0; j <= g.n; ++j)
            f[j] = ps.ur[j] * ps.ur[j] + ps.ut[j] * ps.ut[j] + abs_pow(ps.u[j], m.p + 1.0);
        double val = shell_integral(g, f, 0.0, rad) + hardy_integral(g, ps.u, 0.0, rad);
        out.t.push_back(st.t);
        out.v.push_back(val);
    }
    return out;
}

double energy_distance_sq(const RadialGrid& g, const PhysicalState& A, const PhysicalState& B,
                          double r_lo, double r_hi) {
    std::vector<double> f(g.nodes());
    for (int j = 0; j <= g.n; ++j) {
        const double du = A.ur[j] - B.ur[j];
        const double dv = A.ut[j] - B.ut[j];
        f[j] = du * du + dv * dv;
    }
    return shell_integral(g, f, std::max(0.0, r_lo), std::min(r_hi, g.r_max()));
}

} // namespace wavelab
