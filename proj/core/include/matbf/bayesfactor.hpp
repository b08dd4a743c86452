#pragma once

#include <vector>

#include "matbf/conjugate.hpp"

namespace matbf {

/// One Bayes factor evaluation. log_H and log_kappa are primary; H and kappa
/// are their exponentials and may overflow to +inf.
struct BFEvaluation {
  long t = 0;
  double alpha = 1.0;
  double log_H = 0.0;
  double log_kappa = 0.0;
  double H = 1.0;
  double kappa = 1.0;
};

// Known column covariance. alpha in (0, 1].
BFEvaluation bf_known_v(const Mat& Y, const PosteriorKnownV& post, const KnownVModel& model,
                        double alpha, long t = 0);
double log_kappa_known_v(const PosteriorKnownV& post, const KnownVModel& model, double alpha);
double kappa_known_v(const PosteriorKnownV& post, const KnownVModel& model, double alpha);
/// log C(alpha), the inverse normalizing constant of the powered posterior.
double log_norm_const_known_v(const PosteriorKnownV& post, const KnownVModel& model,
                              double alpha);
/// dH/dalpha, alpha in (0, 1).
double bf_derivative_known_v(const Mat& Y, const PosteriorKnownV& post,
                             const KnownVModel& model, double alpha);
/// d log H / dalpha.
double log_bf_derivative_known_v(const Mat& Y, const PosteriorKnownV& post,
                                 const KnownVModel& model, double alpha);
/// The trace expression with Upsilon = Sigma_d^{-1} Sigma_* Btilde^{-1}.
/// Agrees with bf_derivative_known_v only when Sigma_* and Sigma_L commute.
double bf_derivative_known_v_trace_form(const Mat& Y, const PosteriorKnownV& post,
                                        const KnownVModel& model, double alpha);

// Normal-inverse-Wishart regime. alpha in (alpha_low, 1].
BFEvaluation bf_unknown_v(const Mat& Y, const PosteriorNIW& post, const NIWModel& model,
                          double alpha, long t = 0);
/// Same value as a ratio of the two matrix-t predictive densities.
double log_bf_unknown_v_predictive(const Mat& Y, const PosteriorNIW& post,
                                   const NIWModel& model, double alpha);
/// Y-free bound; (np/2) log alpha above the attained maximum at Y = M_*.
double log_kappa_unknown_v(const PosteriorNIW& post, const NIWModel& model, double alpha);
double kappa_unknown_v(const PosteriorNIW& post, const NIWModel& model, double alpha);
double log_norm_const_unknown_v(const PosteriorNIW& post, const NIWModel& model, double alpha);
double bf_derivative_unknown_v(const Mat& Y, const PosteriorNIW& post, const NIWModel& model,
                               double alpha);
double log_bf_derivative_unknown_v(const Mat& Y, const PosteriorNIW& post,
                                   const NIWModel& model, double alpha);

/// Region {Y : H(Y) >= h0} under known V, in the eigenbases of Sigma_H and V.
struct Ellipsoid {
  struct Axis {
    double xi = 0.0;      // gamma_i * tau_j
    double length = 0.0;  // 2 sqrt(radius_sq * xi)
    int row_index = 0;    // i: eigenvector of Sigma_H
    int col_index = 0;    // j: eigenvector of V
  };

  Mat center;              // M_*
  double radius_sq = 0.0;  // 2 log(kappa / h0)
  Vec gamma;               // eigenvalues of Sigma_H, ascending
  Mat zeta;                // eigenvectors of Sigma_H (columns)
  Vec tau;                 // eigenvalues of V, ascending
  Mat delta;               // eigenvectors of V (columns)
  std::vector<Axis> axes;

  /// sum_ij (zeta_i' (Y - M_*) delta_j)^2 / (gamma_i tau_j).
  double quad_form(const Mat& Y) const;
  bool contains(const Mat& Y, double tol = 1e-9) const;
};

/// DomainError unless alpha in (0, 1) and 0 < h0 <= kappa(alpha); h0 = kappa
/// yields radius_sq = 0.
Ellipsoid acceptance_ellipsoid(const PosteriorKnownV& post, const KnownVModel& model,
                               double alpha, double h0);

/// Sigma_H = (1 - alpha)^{-1} (alpha Sigma_L + Sigma_*) Sigma_*^{-1} (Sigma_L + Sigma_*).
Mat sigma_h(const PosteriorKnownV& post, const KnownVModel& model, double alpha);

}  // namespace matbf
