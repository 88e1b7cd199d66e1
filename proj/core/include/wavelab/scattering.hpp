#ifndef WAVELAB_SCATTERING_HPP
#define WAVELAB_SCATTERING_HPP

#include <string>

#include "wavelab/functionals.hpp"

namespace wavelab {

struct RadiationProfile {
    std::vector<double> eta_grid;
    std::vector<double> g_plus;                 // at the latest usable horizon
    std::vector<double> t_used;                 // horizons, ascending; back() produced g_plus
    std::vector<double> horizon_l2_diff;        // ||g^{(t_k)} - g^{(t_{k+1})}||_{L2}, common domain
    double l2_norm_sq = 0;                      // discrete ||g_plus||^2_{L2(eta)}
    double norm_ratio = 0;                      // ||g_plus||^2 c_d / E
};

// eta grid with spacing dr covering [-support_radius, t_final/2]
std::vector<double> default_eta_grid(const Trajectory& traj, double support_radius);

// g at one horizon: 0.5 (w_t - w_r)(t - eta, t); entries with eta > t - margin
// or off-grid radius are NaN.
std::vector<double> radiation_at_horizon(const Trajectory& traj, double t,
                                         std::span<const double> etas, double margin = 1.0);

RadiationProfile extract_radiation(const Trajectory& traj, std::span<const double> etas);

// L2(eta) distance of the horizon-t1 and horizon-t2 profiles over the fixed
// window eta <= eta_cut (which must be valid for both horizons).
double horizon_difference_l2(const Trajectory& traj, double t1, double t2,
                             std::span<const double> etas, double eta_cut);

// Radiation-profile residual of a state:
//   int (|r^{(d-1)/2} u_r + g(t-r)|^2 + |r^{(d-1)/2} u_t - g(t-r)|^2) dr.
double radiation_residual(const RadialGrid& g, const FieldState& s,
                          std::span<const double> etas, std::span<const double> gp);
TimeSeries radiation_residual_series(const Trajectory& traj, std::span<const double> etas,
                                     std::span<const double> gp);

struct VariationSeries {
    CharLineSpec line;
    std::vector<double> t1, t2;   // dyadic pairs
    std::vector<double> diff;     // |q(t2) - q(t1)|
    std::vector<double> bound;    // (s-t2)^{-beta} or (t1-tau)^{-beta}
    std::vector<double> ratio;
    double fitted_exponent = 0;   // slope of log diff against log bound-scale
};

VariationSeries characteristic_variation(const Trajectory& traj, const CharLineSpec& line,
                                         double t_start);

// Exact free wave (d = 3) with prescribed radiation profile: w = F(t-r) - F(t+r),
// F' = g. Evaluates physical fields on the grid at any time.
class RadiationComparator {
public:
    RadiationComparator(std::vector<double> etas, std::vector<double> g);
    PhysicalState state_on_grid(const RadialGrid& grid, double t) const;
    double g_at(double eta) const;
private:
    double F_at(double eta) const;
    std::vector<double> etas_, g_, F_;
};

// Free evolution (a-part and nonlinearity off) matched to the trajectory state
// at T_match, spanning [t_lo, t_hi].
struct MatchedComparator {
    double T_match = 0;
    Trajectory fwd, bwd;   // internal time measured from T_match
    PhysicalState state_on_grid(const RadialGrid& grid, double t) const;
};

MatchedComparator free_comparator(const Trajectory& traj, double T_match, double t_lo, double t_hi);

// Discrete Cauchy criterion: free-evolve the states at T1 and T2 back to t=0
// and return their squared energy distance.
double cauchy_criterion(const Trajectory& traj, double T1, double T2);

struct ScatteringReport {
    std::string comparator;
    std::vector<double> eta_list;
    std::vector<TimeSeries> exterior_dist_sq;  // per eta
    TimeSeries full_dist_sq;
    std::vector<double> band_c;
    std::vector<double> band_energy;           // at band_time
    double band_time = 0, band_R = 0;
};

struct ExteriorCheckConfig {
    std::vector<double> eta_list{1.0};
    double t_lo = 8.0, t_hi = 24.0, t_step = 2.0;
    std::vector<double> band_c{0.5, 1.0, 2.0};
    double band_R = 6.0;
    double T_match = 16.0;   // used when the radiation comparator is unavailable
    double support_radius = 6.0;
};

ScatteringReport exterior_scattering_check(const Trajectory& traj, const ExteriorCheckConfig& cc);

} // namespace wavelab

#endif
