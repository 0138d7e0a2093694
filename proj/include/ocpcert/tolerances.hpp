#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ocpcert {

/// Thresholds used by the checks. "Tolerances" bound residuals, "margins"
/// are quantities that must be exceeded.
struct Tolerances {
  double tol_dyn = 1e-8;     ///< RK4 residual, scaled by 1 + |x|
  double tol_g = 1e-7;       ///< |g| on C, g <= tol_g elsewhere
  double dist_min = 1e-3;    ///< relative to u_max - u_min (absolute if a bound is infinite)
  double jump_min = 1e-6;    ///< |[u]| at CS / SC junctions
  double fo_min = 1e-6;      ///< |g' f1| on C
  double fit_tol = 1e-6;
  double max_iter = 100;
  double stat_tol = 1e-6;    ///< scaled by 1 + max |p|
  double jump_tol = 1e-7;
  double sc_margin = 1e-6;
  double nec_tol = 1e-8;
  double leg_tol = 1e-8;
  double suf_tol = 1e-8;
  double qomega_tol = 1e-7;  ///< relative, Q = Omega sample

  /// "default", "strict" (residual tolerances x0.1) or "loose" (x10).
  static Tolerances profile(const std::string& name);
  /// Profile named by OCPCERT_TOL_PROFILE, "default" when unset.
  static Tolerances from_environment();

  /// Throws std::invalid_argument for unknown keys.
  void set(const std::string& key, double value);
  /// Parses "key=value".
  void apply_override(const std::string& assignment);
  std::vector<std::pair<std::string, double>> items() const;
};

}  // namespace ocpcert
