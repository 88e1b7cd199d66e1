#include "wavelab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace wavelab {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

// (w_t - w_r)/2 samples on the grid nodes at a snapshot
std::vector<double> half_out_going(const RadialGrid& g, const FieldState& s) {
    std::vector<double> q(g.nodes(), 0.0);
    const double dr = g.dr;
    for (int j = 1; j < g.n; ++j)
        q[j] = 0.5 * (s.wt[j] - (s.w[j + 1] - s.w[j - 1]) / (2.0 * dr));
    q[g.n] = 0.5 * (s.wt[g.n] - (s.w[g.n] - s.w[g.n - 1]) / dr);
    q[0] = 0.5 * s.wt[0];
    return q;
}

double trapz_l2(std::span<const double> x, std::span<const double> f) {
    double sum = 0.0;
    for (size_t k = 0; k + 1 < x.size(); ++k)
        sum += 0.5 * (f[k] * f[k] + f[k + 1] * f[k + 1]) * (x[k + 1] - x[k]);
    return sum;
}

} // namespace

std::vector<double> default_eta_grid(const Trajectory& traj, double support_radius) {
    const double dr = traj.config.grid.dr;
    const double lo = -support_radius, hi = 0.5 * traj.config.t_final;
    std::vector<double> etas;
    const long m = std::lround((hi - lo) / dr);
    etas.reserve(m + 1);
    for (long k = 0; k <= m; ++k) etas.push_back(lo + k * dr);
    return etas;
}

std::vector<double> radiation_at_horizon(const Trajectory& traj, double t,
                                         std::span<const double> etas, double margin) {
    const auto& g = traj.config.grid;
    const auto& s = traj.state_at(t);
    if (std::abs(s.t - t) > 1e-9) throw InsufficientHorizon("horizon not a recorded state");
    const auto q = half_out_going(g, s);
    std::vector<double> out(etas.size(), nan_v);
    for (size_t i = 0; i < etas.size(); ++i) {
        const double r = s.t - etas[i];
        if (etas[i] > s.t - margin) continue;
        if (r < 0.5 * g.dr || r > g.r_max() - 2.0 * g.dr) continue;
        out[i] = interpolate(g, q, r);
    }
    return out;
}

RadiationProfile extract_radiation(const Trajectory& traj, std::span<const double> etas) {
    RadiationProfile prof;
    prof.eta_grid.assign(etas.begin(), etas.end());
    const double t_final = traj.states.back().t;
    const double eta_max = *std::max_element(etas.begin(), etas.end());
    if (t_final - eta_max < 1.0)
        throw InsufficientHorizon("trajectory horizon too short for the requested eta grid");

    // geometric ladder of horizons ending at t_final
    std::vector<double> ladder;
    for (double t = t_final; t >= 2.0 && ladder.size() < 4; t *= 0.5) {
        if (traj.has_state_at(t)) ladder.push_back(t);
    }
    std::sort(ladder.begin(), ladder.end());
    prof.t_used = ladder;

    prof.g_plus = radiation_at_horizon(traj, t_final, etas);
    // ladder differences over one fixed eta window (half the smallest
    // horizon); a growing window would keep injecting the unconverged band
    // near eta = t and mask the stabilization
    const double eta_cut = 0.5 * ladder.front();
    for (size_t k = 0; k + 1 < ladder.size(); ++k)
        prof.horizon_l2_diff.push_back(
            horizon_difference_l2(traj, ladder[k], ladder[k + 1], etas, eta_cut));

    // discrete L2 over the valid part of the grid
    std::vector<double> x, f;
    for (size_t i = 0; i < etas.size(); ++i) {
        if (std::isnan(prof.g_plus[i])) continue;
        x.push_back(etas[i]);
        f.push_back(prof.g_plus[i]);
    }
    prof.l2_norm_sq = trapz_l2(x, f);
    const double E0 = energy(traj.config, to_physical(traj.states.front(), traj.config.grid),
                             Region::make_all()).total;
    prof.norm_ratio = prof.l2_norm_sq * sphere_area(traj.config.grid.d) / std::abs(E0);
    return prof;
}

double horizon_difference_l2(const Trajectory& traj, double t1, double t2,
                             std::span<const double> etas, double eta_cut) {
    const auto g1 = radiation_at_horizon(traj, t1, etas);
    const auto g2 = radiation_at_horizon(traj, t2, etas);
    std::vector<double> x, f;
    for (size_t i = 0; i < etas.size(); ++i) {
        if (etas[i] > eta_cut) continue;
        if (std::isnan(g1[i]) || std::isnan(g2[i])) continue;
        x.push_back(etas[i]);
        f.push_back(g1[i] - g2[i]);
    }
    if (x.size() < 2) throw InsufficientHorizon("no common eta domain between horizons");
    return std::sqrt(trapz_l2(x, f));
}

namespace {

double interp_profile(std::span<const double> etas, std::span<const double> gp, double eta) {
    if (etas.empty() || eta <= etas.front() || eta >= etas.back()) return 0.0;
    const double h = etas[1] - etas[0];
    const size_t k = std::min(static_cast<size_t>((eta - etas.front()) / h), etas.size() - 2);
    const double s = (eta - etas[k]) / h;
    const double a = std::isnan(gp[k]) ? 0.0 : gp[k];
    const double b = std::isnan(gp[k + 1]) ? 0.0 : gp[k + 1];
    return (1.0 - s) * a + s * b;
}

} // namespace

double radiation_residual(const RadialGrid& g, const FieldState& s,
                          std::span<const double> etas, std::span<const double> gp) {
    const double e = 0.5 * (g.d - 1);
    const double dr = g.dr;
    double sum = 0.0, prev = 0.0;
    for (int j = 0; j <= g.n; ++j) {
        double X = 0.0, Y = s.wt[j];
        if (j >= 1) {
            const double wr = (j < g.n) ? (s.w[j + 1] - s.w[j - 1]) / (2.0 * dr)
                                        : (s.w[g.n] - s.w[g.n - 1]) / dr;
            X = wr - e * s.w[j] / g.r(j);
        }
        const double gv = interp_profile(etas, gp, s.t - g.r(j));
        const double integrand = (X + gv) * (X + gv) + (Y - gv) * (Y - gv);
        if (j > 0) sum += 0.5 * (prev + integrand) * dr;
        prev = integrand;
    }
    return sum;
}

TimeSeries radiation_residual_series(const Trajectory& traj, std::span<const double> etas,
                                     std::span<const double> gp) {
    TimeSeries out;
    for (const auto& s : traj.states) {
        out.t.push_back(s.t);
        out.v.push_back(radiation_residual(traj.config.grid, s, etas, gp));
    }
    return out;
}

VariationSeries characteristic_variation(const Trajectory& traj, const CharLineSpec& line,
                                         double t_start) {
    size_t idx = traj.lines.size();
    for (size_t i = 0; i < traj.lines.size(); ++i)
        if (traj.lines[i].kind == line.kind &&
            std::abs(traj.lines[i].offset - line.offset) < 1e-12) { idx = i; break; }
    if (idx == traj.lines.size()) throw LineNotSampled("characteristic line not sampled");
    const auto& samples = traj.line_samples[idx];
    if (samples.size() < 2) throw LineNotSampled("characteristic line has too few samples");

    auto value_at = [&](double t) {
        // linear interpolation on the (dense) sample series
        auto cmp = [](const CharSample& c, double tv) { return c.t < tv; };
        auto it = std::lower_bound(samples.begin(), samples.end(), t, cmp);
        if (it == samples.begin() || it == samples.end())
            throw LineNotSampled("time outside the sampled portion of the line");
        const auto& B = *it;
        const auto& A = *(it - 1);
        const double s = (t - A.t) / (B.t - A.t);
        const double qa = (line.kind == CharLineSpec::incoming) ? A.in_value : A.out_value;
        const double qb = (line.kind == CharLineSpec::incoming) ? B.in_value : B.out_value;
        return (1.0 - s) * qa + s * qb;
    };

    const double beta = traj.derived.beta;
    VariationSeries vs;
    vs.line = line;
    const double t_max = samples.back().t;
    for (double t = t_start; 2.0 * t <= t_max + 1e-9; t *= 2.0) {
        const double t1 = t, t2 = 2.0 * t;
        double bound;
        if (line.kind == CharLineSpec::incoming)
            bound = std::pow(line.offset - t2, -beta);   // (s - t2)^{-beta}
        else
            bound = std::pow(t1 - line.offset, -beta);   // (t1 - tau)^{-beta}
        vs.t1.push_back(t1);
        vs.t2.push_back(t2);
        vs.diff.push_back(std::abs(value_at(t2) - value_at(t1)));
        vs.bound.push_back(bound);
        vs.ratio.push_back(vs.diff.back() / bound);
    }
    // least-squares slope of log diff vs log t1 (decay exponent is -slope)
    if (vs.t1.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (size_t k = 0; k < vs.t1.size(); ++k) {
            if (vs.diff[k] <= 0) continue;
            const double x = std::log(vs.t1[k]), y = std::log(vs.diff[k]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++n;
        }
        if (n >= 2) vs.fitted_exponent = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return vs;
}

// ---------------- comparators ----------------

RadiationComparator::RadiationComparator(std::vector<double> etas, std::vector<double> g)
    : etas_(std::move(etas)), g_(std::move(g)) {
    for (auto& v : g_)
        if (std::isnan(v)) v = 0.0;
    F_.assign(g_.size(), 0.0);
    for (size_t k = 0; k + 1 < g_.size(); ++k)
        F_[k + 1] = F_[k] + 0.5 * (g_[k] + g_[k + 1]) * (etas_[k + 1] - etas_[k]);
}

double RadiationComparator::g_at(double eta) const { return interp_profile(etas_, g_, eta); }

double RadiationComparator::F_at(double eta) const {
    if (eta <= etas_.front()) return 0.0;
    if (eta >= etas_.back()) return F_.back();
    const double h = etas_[1] - etas_[0];
    const size_t k = std::min(static_cast<size_t>((eta - etas_.front()) / h), etas_.size() - 2);
    const double s = (eta - etas_[k]) / h;
    return (1.0 - s) * F_[k] + s * F_[k + 1];
}

PhysicalState RadiationComparator::state_on_grid(const RadialGrid& grid, double t) const {
    PhysicalState ps;
    ps.t = t;
    ps.u.assign(grid.nodes(), 0.0);
    ps.ur.assign(grid.nodes(), 0.0);
    ps.ut.assign(grid.nodes(), 0.0);
    for (int j = 1; j <= grid.n; ++j) {
        const double r = grid.r(j);
        const double gm = g_at(t - r), gpv = g_at(t + r);
        const double w = F_at(t - r) - F_at(t + r);
        const double wt = gm - gpv;
        const double wr = -gm - gpv;
        ps.u[j] = w / r;
        ps.ut[j] = wt / r;
        ps.ur[j] = (wr - w / r) / r;
    }
    ps.u[0] = (4.0 * ps.u[1] - ps.u[2]) / 3.0;
    ps.ut[0] = (4.0 * ps.ut[1] - ps.ut[2]) / 3.0;
    return ps;
}

MatchedComparator free_comparator(const Trajectory& traj, double T_match, double t_lo,
                                  double t_hi) {
    if (!traj.has_state_at(T_match)) throw Error("T_match must be a recorded state");
    if (!(t_lo <= T_match && T_match <= t_hi)) throw Error("comparator window must contain T_match");
    const auto& base = traj.state_at(T_match);

    SolverConfig cfg = traj.config;
    cfg.potential_on = false;      // a = 0; lambda_d geometry stays
    cfg.nonlinearity_on = false;
    cfg.forcing = nullptr;

    MatchedComparator mc;
    mc.T_match = T_match;
    FieldState init = base;
    init.t = 0.0;

    cfg.t_final = t_hi - T_match;
    if (cfg.t_final > 0)
        mc.fwd = evolve(init, cfg, {});
    else { cfg.t_final = 0.0; mc.fwd = evolve(init, cfg, {}); }

    const double back = T_match - t_lo;
    FieldState binit = init;
    for (auto& v : binit.wt) v = -v;
    SolverConfig bcfg = cfg;
    bcfg.t_final = std::max(back, 0.0);
    mc.bwd = evolve(binit, bcfg, {});
    return mc;
}

PhysicalState MatchedComparator::state_on_grid(const RadialGrid& grid, double t) const {
    const double tau = t - T_match;
    if (tau >= -1e-12) {
        auto ps = to_physical(fwd.state_at(tau), grid);
        ps.t = t;
        return ps;
    }
    auto ps = to_physical(bwd.state_at(-tau), grid);
    for (auto& v : ps.ut) v = -v;
    ps.t = t;
    return ps;
}

double cauchy_criterion(const Trajectory& traj, double T1, double T2) {
    if (!(T1 < T2)) throw Error("cauchy criterion needs T1 < T2");
    const auto& g = traj.config.grid;
    SolverConfig cfg = traj.config;
    cfg.potential_on = false;
    cfg.nonlinearity_on = false;
    cfg.forcing = nullptr;

    auto back_to_zero = [&](double T) {
        FieldState init = traj.state_at(T);
        if (std::abs(init.t - T) > 1e-9) throw Error("cauchy endpoint not recorded");
        init.t = 0.0;
        for (auto& v : init.wt) v = -v;
        SolverConfig c = cfg;
        c.t_final = T;
        Trajectory b = evolve(init, c, {});
        FieldState out = b.states.back();
        for (auto& v : out.wt) v = -v;
        return out;
    };
    const FieldState A = back_to_zero(T1);
    const FieldState B = back_to_zero(T2);
    return energy_distance_sq(g, to_physical(A, g), to_physical(B, g), 0.0, g.r_max());
}

ScatteringReport exterior_scattering_check(const Trajectory& traj, const ExteriorCheckConfig& cc) {
    const auto& g = traj.config.grid;
    const double k0 = traj.derived.kappa_0;
    ScatteringReport rep;
    rep.eta_list = cc.eta_list;
    rep.band_c = cc.band_c;
    rep.band_R = cc.band_R;
    rep.band_time = cc.t_hi;

    std::function<PhysicalState(double)> comparator_state;
    if (g.d == 3) {
        rep.comparator = "radiation-built free wave";
        auto etas = default_eta_grid(traj, cc.support_radius);
        auto prof = extract_radiation(traj, etas);
        auto rc = std::make_shared<RadiationComparator>(prof.eta_grid, prof.g_plus);
        comparator_state = [rc, &g](double t) { return rc->state_on_grid(g, t); };
    } else {
        rep.comparator = "matched-data free wave";
        auto mc = std::make_shared<MatchedComparator>(
            free_comparator(traj, cc.T_match, std::min(cc.t_lo, cc.T_match), cc.t_hi));
        comparator_state = [mc, &g](double t) { return mc->state_on_grid(g, t); };
    }

    rep.exterior_dist_sq.resize(cc.eta_list.size());
    for (double t = cc.t_lo; t <= cc.t_hi + 1e-9; t += cc.t_step) {
        if (!traj.has_state_at(t)) continue;
        const auto pu = to_physical(traj.state_at(t), g);
        const auto pv = comparator_state(t);
        for (size_t i = 0; i < cc.eta_list.size(); ++i) {
            const double eta = cc.eta_list[i];
            if (t < eta) continue;
            rep.exterior_dist_sq[i].t.push_back(t);
            rep.exterior_dist_sq[i].v.push_back(
                energy_distance_sq(g, pu, pv, t - eta, g.r_max()));
        }
        rep.full_dist_sq.t.push_back(t);
        rep.full_dist_sq.v.push_back(energy_distance_sq(g, pu, pv, 0.0, g.r_max()));
    }

    const double tb = rep.band_time;
    const auto pu = to_physical(traj.state_at(tb), g);
    const auto pv = comparator_state(tb);
    for (double c : cc.band_c) {
        const double lo = tb - c * std::pow(tb, 1.0 - k0);
        const double hi = std::min(tb + cc.band_R, g.r_max());
        rep.band_energy.push_back(energy_distance_sq(g, pu, pv, std::max(lo, 0.0), hi));
    }
    return rep;
}

} // namespace wavelab
