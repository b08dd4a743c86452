#pragma once

#include <cstddef>
#include <vector>

#include "matbf/conjugate.hpp"

namespace matbf {

/// Gamma-mixture (Ruben) expansion of Q = sum_j lambda_j chi2_n(2 U_jj):
///   P(Q <= x) = sum_k c_k G(x; np/2 + k, 2 lambda_scale).
struct RubenSeries {
  double lambda_scale = 1.0;
  std::vector<double> coeffs;
  std::size_t K = 0;
  double tail_bound = 0.0;  // 1 - sum_k c_k
  bool converged = false;
  Vec eigenvalues;
  Vec U_diag;
  int n = 1;

  double shape0() const { return 0.5 * n * static_cast<double>(eigenvalues.size()); }
  double cdf(double x) const;
  double sf(double x) const;  // 1 - cdf, accurate in the upper tail
  double pdf(double x) const;
};

/// NumericalError when the mixture weights underflow; `converged` is false
/// when the cap is reached before the tail drops below tol.
RubenSeries ruben_coeffs(const Vec& eigenvalues, const Vec& U_diag, int n, double lambda_scale,
                         double tol = 1e-12, std::size_t cap = 10000);

enum class Hypothesis { null, alternative };

/// Law of H(alpha) when Y ~ N(M_tilde, Sigma_tilde, V), known V. H = kappa
/// exp(-Q/2) with Q a weighted sum of chi-squares on n degrees of freedom.
class BFDistribution {
 public:
  BFDistribution(const PosteriorKnownV& post, const KnownVModel& model, double alpha,
                 const Mat& M_tilde, const Mat& Sigma_tilde);
  /// M_tilde = M_*, Sigma_tilde = Sigma_d (null) or Sigma_{A,d} (alternative).
  static BFDistribution for_hypothesis(const PosteriorKnownV& post, const KnownVModel& model,
                                       double alpha, Hypothesis hyp);

  double alpha() const { return alpha_; }
  double log_kappa() const { return log_kappa_; }
  /// True when all weights coincide within 1e-10 relative and a single
  /// (non)central chi-square is used.
  bool exact() const { return exact_; }
  const Vec& eigenvalues() const { return lambda_; }

  // Distribution of Q = -2 log(H / kappa).
  double q_cdf(double x) const;
  double q_sf(double x) const;
  double q_pdf(double x) const;

  /// P(H <= h); 1 for h >= kappa, 0 for h <= 0.
  double cdf(double h) const;
  double pdf(double h) const;
  /// P(H <= h) with h given as log h.
  double cdf_log(double log_h) const;

 private:
  double alpha_ = 1.0;
  double log_kappa_ = 0.0;
  int n_ = 1;
  Vec lambda_;
  Vec U_;
  bool exact_ = false;
  double common_lambda_ = 1.0;
  double df_ = 1.0;
  double noncentrality_ = 0.0;  // sum_j 2 U_jj
  RubenSeries series_;
};

double bf_cdf(double h, const PosteriorKnownV& post, const KnownVModel& model, double alpha,
              Hypothesis hyp);
double bf_pdf(double h, const PosteriorKnownV& post, const KnownVModel& model, double alpha,
              Hypothesis hyp);

/// Scalar closed form, Y ~ N(theta, sigma^2), K = phi + t - 1 absorbed terms.
double univ_bf_cdf(double h, double theta, double m_star, double sigma, double phi, long t,
                   double alpha);

}  // namespace matbf
