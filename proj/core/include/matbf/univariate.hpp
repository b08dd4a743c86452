#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace matbf {

// Scalar Gaussian model with a stepwise-uniform prior on the location.

struct StepSegment {
  double lower = 0.0;
  double upper = 0.0;
  double g = 0.0;  // prior density on (lower, upper)
  /// Optional likelihood value p(Y | theta_j) at some theta_j in the segment,
  /// used by the mean-value form. NaN selects the segment midpoint.
  double likelihood = std::numeric_limits<double>::quiet_NaN();
};

struct StepPrior {
  std::vector<StepSegment> segments;
  double sigma = 1.0;  // likelihood standard deviation
  double Y = 0.0;      // observation

  double mass() const;  // sum_j g_j (upper_j - lower_j)
  /// DomainError on overlapping or empty segments, nonpositive g or sigma, or
  /// |mass - 1| > tol.
  void validate(double tol = 1e-6) const;
  /// Copy with g rescaled to unit mass.
  StepPrior normalized() const;
};

enum class StepForm {
  exact,       // segment integrals of N(Y; theta, sigma^2) via the normal cdf
  mean_value,  // p_j * lambda(Theta_j) with p_j from StepSegment::likelihood
};

/// H(alpha) with C(alpha) = (sum_j g_j^alpha lambda(Theta_j))^{-1}.
double step_prior_bf(const StepPrior& prior, double alpha, StepForm form = StepForm::exact);

/// First alpha in [lo, hi] where bf(alpha) - 1 changes sign on a 1000-point
/// grid, refined by bisection; nullopt when there is no strict sign change.
std::optional<double> find_unit_crossing(const std::function<double(double)>& bf, double lo,
                                         double hi, double tol = 1e-10);

// Conjugate normal model: Y_s ~ N(theta, sigma^2), theta ~ N(m, sigma^2/phi),
// t - 1 absorbed observations, K = phi + t - 1.

struct UnivBF {
  double H = 1.0;
  double kappa = 1.0;
  double log_H = 0.0;
  double log_kappa = 0.0;
  double A = 0.0;  // log H = log kappa + (Y - m_*)^2 / A
};

/// alpha in (0, 1]; A = -inf at alpha = 1.
UnivBF univ_bf_closed_form(double Y, double m_star, double sigma, double phi, long t,
                           double alpha);
/// dH/dalpha.
double univ_bf_derivative(double Y, double m_star, double sigma, double phi, long t,
                          double alpha);
/// Stationary point 1 / (K (z - 1)), z = (Y - m_*)^2 / sigma^2, when it lies in (0, 1).
std::optional<double> univ_stationary_alpha(double Y, double m_star, double sigma, double phi,
                                            long t);
/// Endpoints of {Y : H(Y) >= h0}; requires 0 < h0 <= kappa and alpha in (0, 1).
std::pair<double, double> univ_acceptance_interval(double m_star, double sigma, double phi,
                                                   long t, double alpha, double h0);
/// Closed-form bound on the integral of kappa over (0, 1).
double univ_ibf_bound(double phi, long t);

}  // namespace matbf
