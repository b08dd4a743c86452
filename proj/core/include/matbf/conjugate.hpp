#pragma once

#include "matbf/linalg.hpp"
#include "matbf/matdist.hpp"
#include "matbf/types.hpp"

namespace matbf {

/// Streaming sufficient statistics of a block of observations: running mean
/// and, when a row-scale factor is supplied, the whitened scatter
/// sum_s (Y_s - Ybar)' Sigma_L^{-1} (Y_s - Ybar) (Welford form).
class SuffStats {
 public:
  SuffStats() = default;
  SuffStats(int p, int n);
  SuffStats(int p, int n, const SpdFactor& sigma_l);

  void add(const Mat& Y);
  long count() const { return count_; }
  const Mat& mean() const { return mean_; }
  bool has_scatter() const { return has_scatter_; }
  /// Total (not averaged) scatter; equals T * S.
  Mat scatter() const;

 private:
  long count_ = 0;
  Mat mean_;
  Mat scatter_;
  SpdFactor sigma_l_;
  bool has_scatter_ = false;
};

SuffStats suff_stats(const MatrixSeries& data);
SuffStats suff_stats(const MatrixSeries& data, const SpdFactor& sigma_l);

/// Posterior of B given data under a known column covariance, with prior
/// row scale Sigma_L / phi.
PosteriorKnownV update_known_v(const KnownVModel& model, const MatrixSeries& data);
PosteriorKnownV update_known_v(const KnownVModel& model, const SuffStats& stats);

/// Same posterior through the stacked Tp x Tp system. Test oracle; T <= 5.
PosteriorKnownV update_known_v_stacked(const KnownVModel& model, const MatrixSeries& data);

PosteriorNIW update_niw(const NIWModel& model, const MatrixSeries& data);
/// `stats` must carry the Sigma_L-whitened scatter.
PosteriorNIW update_niw(const NIWModel& model, const SuffStats& stats);

struct PredictiveKnownV {
  double alpha = 1.0;
  Mat M_star;
  Mat Sigma_d;   // Sigma_L + Sigma_*
  Mat Sigma_Ad;  // Sigma_L + Sigma_* / alpha
  Mat V;

  MatNormParams null_params() const { return {M_star, Sigma_d, V}; }
  MatNormParams alt_params() const { return {M_star, Sigma_Ad, V}; }
};

PredictiveKnownV predictive_known_v(const PosteriorKnownV& post, const KnownVModel& model,
                                    double alpha);

struct PredictiveNIW {
  double alpha = 1.0;
  Mat M_star;
  Mat Sigma_L;
  Mat Psi_star;
  Mat Psi_A_star;  // alpha * Psi_*
  double k_star = 0, k_d = 0, k_A_star = 0, k_A_d = 0;
  double m_star = 0, m_d = 0, m_A_star = 0, m_A_d = 0;
  double nu_null = 0, nu_alt = 0;  // m_* - 2n and m_{A,*} - 2n
  Mat L_star;                      // Psi_* k_d / k_*
  Mat L_A_star;                    // Psi_{A,*} k_{A,d} / k_{A,*}

  MatTParams null_params() const { return {nu_null, M_star, Sigma_L, L_star}; }
  MatTParams alt_params() const { return {nu_alt, M_star, Sigma_L, L_A_star}; }
};

/// Lower end of the admissible alpha range, (p + 2n) / (m_* + p).
double alpha_low_niw(const PosteriorNIW& post, int p, int n);

/// DomainError when alpha <= alpha_low_niw or alpha > 1.
PredictiveNIW predictive_niw(const PosteriorNIW& post, const NIWModel& model, double alpha);

}  // namespace matbf
