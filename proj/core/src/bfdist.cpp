#include "matbf/bfdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "matbf/bayesfactor.hpp"
#include "matbf/errors.hpp"
#include "matbf/univariate.hpp"

namespace matbf {

namespace {

// h = kappa up to exp/log rounding. Near the upper endpoint F ~ 1 - c sqrt(x)
// for np = 1, so a one-ulp gap in log kappa would otherwise move F by ~1e-8.
double endpoint_snap(double log_kappa) {
  return 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(log_kappa));
}

constexpr double kSpreadTol = 1e-10;

// Gamma(shape, scale) density at x.
double gamma_density(double x, double shape, double scale) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p_derivative(shape, x / scale) / scale;
}

}  // namespace

double RubenSeries::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double a0 = shape0();
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (coeffs[k] == 0.0) continue;
    s += coeffs[k] * boost::math::gamma_p(a0 + static_cast<double>(k), x / (2.0 * lambda_scale));
  }
  return std::clamp(s, 0.0, 1.0);
}

double RubenSeries::sf(double x) const {
  if (x <= 0.0) return 1.0;
  const double a0 = shape0();
  double s = tail_bound;  // unrepresented mass sits in the far upper tail
  for (std::size_t k = 0; k < K; ++k) {
    if (coeffs[k] == 0.0) continue;
    s += coeffs[k] * boost::math::gamma_q(a0 + static_cast<double>(k), x / (2.0 * lambda_scale));
  }
  return std::clamp(s, 0.0, 1.0);
}

double RubenSeries::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  const double a0 = shape0();
  double s = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    if (coeffs[k] != 0.0)
      s += coeffs[k] * gamma_density(x, a0 + static_cast<double>(k), 2.0 * lambda_scale);
  return s;
}

RubenSeries ruben_coeffs(const Vec& eigenvalues, const Vec& U_diag, int n, double lambda_scale,
                         double tol, std::size_t cap) {
  const Eigen::Index p = eigenvalues.size();
  if (p < 1) throw DomainError("ruben_coeffs: no eigenvalues");
  if (U_diag.size() != p) throw ShapeError("ruben_coeffs: U_diag length differs from eigenvalues");
  if (n < 1) throw DomainError("ruben_coeffs: n must be positive");
  if (!(eigenvalues.minCoeff() > 0.0)) throw DomainError("ruben_coeffs: eigenvalues must be > 0");
  if ((U_diag.array() < 0.0).any()) throw DomainError("ruben_coeffs: U_jj must be >= 0");
  if (!(lambda_scale > 0.0) || lambda_scale > eigenvalues.minCoeff() * (1.0 + 1e-14))
    throw DomainError("ruben_coeffs: lambda_scale must lie in (0, min lambda_j]");
  if (!(tol > 0.0)) throw DomainError("ruben_coeffs: tol must be positive");

  RubenSeries s;
  s.lambda_scale = lambda_scale;
  s.eigenvalues = eigenvalues;
  s.U_diag = U_diag;
  s.n = n;

  const Vec r = (1.0 - lambda_scale / eigenvalues.array()).max(0.0).matrix();  // in [0, 1)
  const Vec u_over = (U_diag.array() / eigenvalues.array()).matrix();

  double log_c0 = -U_diag.sum();
  for (Eigen::Index j = 0; j < p; ++j) log_c0 -= 0.5 * n * std::log(eigenvalues(j) / lambda_scale);
  if (log_c0 < -700.0)
    throw NumericalError("ruben_coeffs: leading mixture weight underflows (log c0 = " +
                         std::to_string(log_c0) + ")");
  const double c0 = std::exp(log_c0);

  // d_k for k >= 1; f_0 = 1, f_{k} = (1/k) sum_{j=1}^{k} j d_j f_{k-j}; c_k = c0 f_k.
  std::vector<double> d{0.0};
  std::vector<double> f{1.0};
  Vec rk = Vec::Ones(p);  // r^{k-1}
  double sum = c0;
  s.coeffs.push_back(c0);
  while (1.0 - sum >= tol && s.coeffs.size() < cap) {
    const std::size_t k = d.size();
    double quad = 0.0, lin = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      lin += u_over(j) * rk(j);
      rk(j) *= r(j);
      quad += rk(j);
    }
    d.push_back(0.5 * n * quad / static_cast<double>(k) + lambda_scale * lin);
    double fk = 0.0;
    for (std::size_t j = 1; j <= k; ++j) fk += static_cast<double>(j) * d[j] * f[k - j];
    fk /= static_cast<double>(k);
    f.push_back(fk);
    const double ck = c0 * fk;
    s.coeffs.push_back(ck);
    sum += ck;
    // All increments vanish once every r_j^k and the linear term underflow.
    if (ck == 0.0 && rk.maxCoeff() == 0.0) break;
  }
  s.K = s.coeffs.size();
  s.tail_bound = std::max(0.0, 1.0 - sum);
  s.converged = s.tail_bound < tol;
  return s;
}

BFDistribution::BFDistribution(const PosteriorKnownV& post, const KnownVModel& model,
                               double alpha, const Mat& M_tilde, const Mat& Sigma_tilde)
    : alpha_(alpha) {
  model.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("BF distribution requires alpha in (0, 1); H is identically 1 at alpha = 1");
  const Eigen::Index p = model.p();
  n_ = model.n();
  require_shape(M_tilde, p, n_, "M_tilde");
  require_shape(Sigma_tilde, p, p, "Sigma_tilde");
  log_kappa_ = log_kappa_known_v(post, model, alpha);

  // Q = tr[Sigma_H^{-1} D V^{-1} D'] with D ~ N(M_tilde - M_*, Sigma_tilde, V). Whitening by
  // Sigma_tilde = C C' and V = R R' leaves Q = sum_i lambda_i chi2_n(delta_i), lambda the
  // eigenvalues of C' Sigma_H^{-1} C.
  const SpdFactor C(Sigma_tilde, "Sigma_tilde");
  const SpdFactor H(sigma_h(post, model, alpha), "Sigma_H");
  const SpdFactor R(model.V, "V");
  const Mat L = C.matrixL();
  const Mat W = L.transpose() * H.solve(L);
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(W));
  if (es.info() != Eigen::Success) throw NumericalError("BF distribution: eigensolver failed");
  lambda_ = es.eigenvalues();
  if (!(lambda_.minCoeff() > 0.0)) throw NumericalError("BF distribution: non-positive weight");

  const Mat mu = R.lower_solve(C.lower_solve(M_tilde - post.M_star).transpose()).transpose();
  const Mat rot = es.eigenvectors().transpose() * mu;
  U_ = (0.5 * rot.rowwise().squaredNorm()).eval();

  const double lo = lambda_.minCoeff(), hi = lambda_.maxCoeff();
  exact_ = (hi - lo) <= kSpreadTol * hi;
  if (exact_) {
    common_lambda_ = lambda_.mean();
    df_ = static_cast<double>(n_) * static_cast<double>(p);
    noncentrality_ = 2.0 * U_.sum();
  } else {
    series_ = ruben_coeffs(lambda_, U_, n_, lo);
    if (!series_.converged)
      throw NumericalError("BF distribution: mixture series did not converge within cap (tail " +
                           std::to_string(series_.tail_bound) + ")");
  }
}

BFDistribution BFDistribution::for_hypothesis(const PosteriorKnownV& post,
                                              const KnownVModel& model, double alpha,
                                              Hypothesis hyp) {
  const PredictiveKnownV pred = predictive_known_v(post, model, alpha);
  return BFDistribution(post, model, alpha, post.M_star,
                        hyp == Hypothesis::null ? pred.Sigma_d : pred.Sigma_Ad);
}

double BFDistribution::q_cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (!exact_) return series_.cdf(x);
  const double z = x / common_lambda_;
  if (noncentrality_ == 0.0) return boost::math::gamma_p(0.5 * df_, 0.5 * z);
  return boost::math::cdf(boost::math::non_central_chi_squared(df_, noncentrality_), z);
}

double BFDistribution::q_sf(double x) const {
  if (x <= 0.0) return 1.0;
  if (!exact_) return series_.sf(x);
  const double z = x / common_lambda_;
  if (noncentrality_ == 0.0) return boost::math::gamma_q(0.5 * df_, 0.5 * z);
  return boost::math::cdf(
      boost::math::complement(boost::math::non_central_chi_squared(df_, noncentrality_), z));
}

double BFDistribution::q_pdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (!exact_) return series_.pdf(x);
  const double z = x / common_lambda_;
  if (noncentrality_ == 0.0) return gamma_density(z, 0.5 * df_, 2.0) / common_lambda_;
  return boost::math::pdf(boost::math::non_central_chi_squared(df_, noncentrality_), z) /
         common_lambda_;
}

double BFDistribution::cdf_log(double log_h) const {
  if (std::isnan(log_h)) throw DomainError("BF cdf: NaN argument");
  // H <= h  <=>  Q >= -2 log(h / kappa).
  const double x = -2.0 * (log_h - log_kappa_);
  if (x <= endpoint_snap(log_kappa_)) return 1.0;
  return q_sf(x);
}

double BFDistribution::cdf(double h) const {
  if (!(h > 0.0)) throw DomainError("BF cdf: h must be positive");
  return cdf_log(std::log(h));
}

double BFDistribution::pdf(double h) const {
  if (!(h > 0.0)) throw DomainError("BF pdf: h must be positive");
  const double lh = std::log(h);
  if (lh > log_kappa_) return 0.0;
  return (2.0 / h) * q_pdf(-2.0 * (lh - log_kappa_));
}

double bf_cdf(double h, const PosteriorKnownV& post, const KnownVModel& model, double alpha,
              Hypothesis hyp) {
  const auto dist = BFDistribution::for_hypothesis(post, model, alpha, hyp);
  if (h > std::exp(dist.log_kappa()) * (1.0 + 1e-12))
    throw DomainError("bf_cdf: h above the support bound kappa(alpha)");
  return dist.cdf(h);
}

double bf_pdf(double h, const PosteriorKnownV& post, const KnownVModel& model, double alpha,
              Hypothesis hyp) {
  const auto dist = BFDistribution::for_hypothesis(post, model, alpha, hyp);
  if (h > std::exp(dist.log_kappa()) * (1.0 + 1e-12))
    throw DomainError("bf_pdf: h above the support bound kappa(alpha)");
  return dist.pdf(h);
}

double univ_bf_cdf(double h, double theta, double m_star, double sigma, double phi, long t,
                   double alpha) {
  if (!(sigma > 0.0)) throw DomainError("univ_bf_cdf: sigma must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("univ_bf_cdf: alpha must be in (0, 1)");
  if (!(h > 0.0)) throw DomainError("univ_bf_cdf: h must be positive");
  const UnivBF at_mean = univ_bf_closed_form(m_star, m_star, sigma, phi, t, alpha);
  const double x = -2.0 * (std::log(h) - at_mean.log_kappa);
  if (x < -1e-12) throw DomainError("univ_bf_cdf: h above the support bound kappa(alpha)");
  if (x <= endpoint_snap(at_mean.log_kappa)) return 1.0;
  // log H = log kappa - (Y - m_*)^2 / (2 sigma_H^2), so sigma_H^2 = -A / 2.
  const double c = std::sqrt(x * (-0.5 * at_mean.A) / (sigma * sigma));
  const double g = std::abs(theta - m_star) / sigma;
  const boost::math::normal z;
  return boost::math::cdf(boost::math::complement(z, c - g)) + boost::math::cdf(z, -c - g);
}

}  // namespace matbf
