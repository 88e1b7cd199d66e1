#ifndef WAVELAB_TOLERANCES_HPP
#define WAVELAB_TOLERANCES_HPP

// Acceptance thresholds, pinned in one place. Relative tolerances are taken
// against the named scale (total energy E, or the quadratic-form scale of the
// local Hardy report).

namespace wavelab::tol {

inline constexpr double exponent_identity   = 1e-12;  // closed-form identities
inline constexpr double oracle_sup_error    = 5e-4;   // free d=3 run vs d'Alembert at t=5
inline constexpr double energy_drift_rel    = 1e-6;   // reference-run drift
inline constexpr double flux_residual_rel   = 1e-4;   // |dE_cone - flux| / E
inline constexpr double cone_hardy_slack_rel = -1e-8; // full-cone trace Hardy
inline constexpr double hardy_identity_rel  = 1e-8;   // |f(R) - identity| / scale
inline constexpr double hardy_nonneg_rel    = -1e-10; // f(R) / scale lower bound
inline constexpr double hardy_witness_rel   = 1e-6;   // witness f(R) / scale upper bound
inline constexpr double morawetz_slack_rel  = -1e-4;  // slack / E lower bound
inline constexpr double radiation_l2_error  = 1e-3;   // linear run vs closed form
inline constexpr double beta_fit_center     = 0.25;   // horizon-stability exponent
inline constexpr double beta_fit_band       = 0.15;
inline constexpr double order_lo            = 1.7;    // second-order windows
inline constexpr double order_hi            = 2.3;
inline constexpr double trend_jitter        = 1.05;   // allowed step-up factor in a
                                                      // series asserted "decreasing"
inline constexpr double band_linear_factor  = 2.0;    // band energy proportional to c
inline constexpr double exterior_floor_factor = 10.0; // final value vs scheme floor
inline constexpr double tail_ratio_bound    = 10.0;   // weighted tail-decay ratios

} // namespace wavelab::tol

#endif
