#pragma once

#include <cstdint>
#include <string>

#include "matbf/bfdist.hpp"

namespace matbf {

/// Which tail of F_1 the power target refers to.
///   upper_survival: 1 - F_1(h_upper) = beta (default).
///   upper_cdf:      F_1(h_upper) = beta, i.e. P(H > h_upper | alternative) = 1 - beta.
enum class PowerConvention { upper_survival, upper_cdf };

struct CalibrationOptions {
  double alpha_lo = 0.01;
  double alpha_hi = 0.99;
  int prescan = 64;
  double alpha_tol = 1e-10;
  PowerConvention convention = PowerConvention::upper_survival;
};

struct CalibrationResult {
  double alpha_star = 1.0;
  double h_lower = 0.0;
  double h_upper = 2.0;  // 2 - h_lower
  double tau = 0.0;
  double beta = 0.0;
  double achieved_power = 0.0;
  /// False when no alpha in the search range reaches beta; alpha_star is then
  /// the power-maximizing grid point.
  bool feasible = false;
  PowerConvention convention = PowerConvention::upper_survival;
  /// F_0(h_lower) - tau at alpha_star.
  double size_residual = 0.0;
};

/// Lower threshold h with F_0(h) = tau, by root finding in Q = -2 log(h / kappa).
double lower_threshold(const BFDistribution& null_dist, double tau);

/// Three-step calibration under known V. InputError when tau or beta is
/// outside (0, 1) or the alpha range is invalid.
CalibrationResult calibrate(const PosteriorKnownV& post, const KnownVModel& model, double tau,
                            double beta, const CalibrationOptions& opts = {});

/// Production posterior Sigma_* = Sigma_L / (phi + T): thresholds do not depend
/// on Sigma_L or V, so identity scales are used.
CalibrationResult calibrate_production(int p, int n, double phi, long T, double tau, double beta,
                                       const CalibrationOptions& opts = {});

/// Unknown-V extension: F_0 and F_1 replaced by empirical laws of H from
/// `draws` simulated predictive observations (common random numbers across alpha).
CalibrationResult calibrate_unknown_v_mc(const PosteriorNIW& post, const NIWModel& model,
                                         double tau, double beta, CalibrationOptions opts = {},
                                         std::size_t draws = 10000, std::uint64_t seed = 1);

enum class Decision { reject_null, accept_null, inconclusive };

Decision decide(double H, const CalibrationResult& cal);
/// Same rule on log H; use when H may underflow.
Decision decide_log(double log_H, const CalibrationResult& cal);
std::string to_string(Decision d);
std::string to_string(PowerConvention c);

/// Jeffreys evidence category for 1/H against the null.
std::string jeffreys_label(double H);
std::string jeffreys_label_log(double log_H);

}  // namespace matbf
