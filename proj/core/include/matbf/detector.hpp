#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matbf/bayesfactor.hpp"
#include "matbf/calibrate.hpp"
#include "matbf/classical.hpp"
#include "matbf/robust.hpp"

namespace matbf {

enum class SigmaEstimator { least_squares, user_supplied };

struct DetectorConfig {
  std::size_t window = 50;
  Regime regime = Regime::known_v;
  double tau = 0.01;
  double beta = 0.8;
  /// Extra alpha values at which H is reported for every t.
  std::vector<double> alpha_fixed;
  /// Optional per-t BF-vs-alpha curve.
  std::vector<double> curve_grid;
  /// Robust weights; default_weight modes 0.7 and 0.3 when unset.
  std::optional<TruncatedBeta> weight_primary;
  std::optional<TruncatedBeta> weight_secondary;
  bool robust = true;
  SigmaEstimator sigma_estimator = SigmaEstimator::least_squares;
  std::optional<Mat> sigma_l;  // required for user_supplied
  std::optional<Mat> V;        // known-V column covariance; identity when unset
  bool freeze_sigma = false;   // estimate Sigma_L on the first window only
  CalibrationOptions calibration;
  /// Skip calibration and use these thresholds (must match p, n and w).
  std::optional<CalibrationResult> calibration_override;
  // Unknown-V prior: V ~ IW(niw_psi, niw_m); rho scales the prior precision.
  std::optional<Mat> niw_psi;  // identity when unset
  std::optional<double> niw_m; // 2n + 3 when unset
  double niw_rho = 1.0;
  std::size_t mc_draws = 10000;
  std::uint64_t seed = 1;
  bool classical = true;
  ClassicalOptions classical_opts;

  void validate() const;
};

struct DecisionRow {
  long t = 0;
  double alpha_star = 1.0;
  double log_H = 0.0;
  double H = 1.0;
  double log_kappa = 0.0;
  double kappa = 1.0;
  double h_lower = 0.0;
  double h_upper = 2.0;
  Decision decision = Decision::inconclusive;
  std::string jeffreys;
  MinimumBF mbf;
  std::vector<double> ibf;  // one per weight
  std::vector<double> ibf_error;
  std::vector<double> nibf;
  std::string robust_error;  // set when a robust summary could not be formed
  std::vector<double> log_H_fixed;  // aligned with config.alpha_fixed
  std::vector<BFEvaluation> curve;  // aligned with config.curve_grid
  std::vector<long> classical_counts;  // per classical level at this t
};

struct DecisionReport {
  int p = 0, n = 0;
  std::size_t window = 0;
  Regime regime = Regime::known_v;
  CalibrationResult calibration;
  std::vector<TruncatedBeta> weights;
  std::vector<double> alpha_fixed;
  std::vector<double> curve_grid;
  std::vector<DecisionRow> rows;
  std::optional<ClassicalReport> classical;
};

/// Rolling-window detector. Observation s (0-based, s >= w) is scored against
/// the posterior from observations s-w .. s-1; the prior mean is the previous
/// window's posterior mean (window sample mean for the first window), phi = w.
DecisionReport run_sequential(const MatrixSeries& series, const DetectorConfig& config);

/// H and kappa over `grid` for the observation with time index t.
std::vector<BFEvaluation> bf_alpha_curve(const MatrixSeries& series, const DetectorConfig& config,
                                         long t, const std::vector<double>& grid);

/// Least-squares row covariance of a window: sum_s R_s V^{-1} R_s' / ((w-1) n)
/// with R_s = Y_s - Ybar, plus a 1e-8 tr/p ridge. CovarianceError when degenerate.
Mat estimate_sigma_l(const MatrixSeries& window, const Mat& V);

std::string to_string(Regime r);

}  // namespace matbf
