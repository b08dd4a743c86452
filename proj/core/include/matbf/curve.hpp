#pragma once

#include "matbf/conjugate.hpp"

namespace matbf {

// Bayes factor as a function of alpha for one observation. Construction costs
// one eigendecomposition; each evaluation is O(p) (known V) or O(n) plus the
// multivariate gamma terms (unknown V). Values agree with bf_known_v /
// bf_unknown_v to rounding.

class KnownVCurve {
 public:
  KnownVCurve(const Mat& Y, const PosteriorKnownV& post, const KnownVModel& model);

  double log_H(double alpha) const;
  double log_kappa(double alpha) const;
  double dlog_H(double alpha) const;
  /// Domain is (0, 1]; evaluations clamp to [1e-6, 1] upstream.
  double alpha_low() const { return 0.0; }

 private:
  double n_ = 0.0;
  Vec lambda_;  // eigenvalues of L^{-1} Sigma_* L^{-T}, Sigma_L = L L'
  Vec w_;       // diag of Q' L^{-1} D V^{-1} D' L^{-T} Q
};

class UnknownVCurve {
 public:
  UnknownVCurve(const Mat& Y, const PosteriorNIW& post, const NIWModel& model);

  double log_H(double alpha) const;
  double log_kappa(double alpha) const;
  double dlog_H(double alpha) const;
  double alpha_low() const { return alpha_low_; }

 private:
  int p_ = 0, n_ = 0;
  double k_star_ = 0.0, m_star_ = 0.0;
  double logdet_psi_ = 0.0;
  double alpha_low_ = 0.0;
  Vec mu_;  // generalized eigenvalues of E relative to Psi_*
};

}  // namespace matbf
