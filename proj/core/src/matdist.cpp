#include "matbf/matdist.hpp"

#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/chi_squared_distribution.hpp>

#include "matbf/errors.hpp"
#include "matbf/rng.hpp"

namespace matbf {

namespace {

constexpr double kLogPi = 1.1447298858494002;     // log(pi)
constexpr double kLog2Pi = 1.8378770664093453;    // log(2 pi)
constexpr double kLog2 = 0.69314718055994531;

void check_matnorm(const Mat& X, const MatNormParams& P) {
  require_square(P.Sigma, "matrix normal Sigma");
  require_square(P.Psi_col, "matrix normal Psi");
  require_shape(P.M, P.Sigma.rows(), P.Psi_col.rows(), "matrix normal mean");
  require_shape(X, P.M.rows(), P.M.cols(), "matrix normal argument");
}

}  // namespace

double log_multigamma(int n, double a) {
  if (n < 1) throw DomainError("log_multigamma: n must be positive");
  if (!(a > 0.5 * (n - 1)))
    throw DomainError("log_multigamma: argument " + std::to_string(a) +
                      " at or below the pole boundary (n-1)/2 = " + std::to_string(0.5 * (n - 1)));
  double s = 0.25 * n * (n - 1) * kLogPi;
  for (int j = 1; j <= n; ++j) s += boost::math::lgamma(a + 0.5 * (1 - j));
  return s;
}

double multidigamma_sum(int n, double a) {
  if (n < 1) throw DomainError("multidigamma_sum: n must be positive");
  if (!(a > 0.5 * (n - 1))) throw DomainError("multidigamma_sum: argument at or below (n-1)/2");
  double s = 0.0;
  for (int j = 1; j <= n; ++j) s += boost::math::digamma(a + 0.5 * (1 - j));
  return s;
}

double matnorm_logpdf(const Mat& X, const MatNormParams& params) {
  check_matnorm(X, params);
  const SpdFactor S(params.Sigma, "matrix normal Sigma");
  const SpdFactor P(params.Psi_col, "matrix normal Psi");
  const double p = static_cast<double>(X.rows()), n = static_cast<double>(X.cols());
  const double q = kron_quad(S, X - params.M, P);
  return -0.5 * q - 0.5 * n * p * kLog2Pi - 0.5 * n * S.logdet() - 0.5 * p * P.logdet();
}

std::vector<Mat> matnorm_sample(const MatNormParams& params, std::uint64_t seed,
                                std::size_t count) {
  check_matnorm(params.M, params);
  if (count < 1) throw DomainError("matnorm_sample: count must be >= 1");
  const Mat A = SpdFactor(params.Sigma, "matrix normal Sigma").matrixL();
  const Mat B = SpdFactor(params.Psi_col, "matrix normal Psi").matrixL();
  CounterRng rng(seed);
  std::vector<Mat> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Mat Z = rng.normal_matrix(params.M.rows(), params.M.cols());
    out.push_back(params.M + A * Z * B.transpose());
  }
  return out;
}

double invwishart_logpdf(const Mat& V, const InvWishartParams& params) {
  require_square(params.Psi, "inverse Wishart Psi");
  require_shape(V, params.Psi.rows(), params.Psi.cols(), "inverse Wishart argument");
  const double n = static_cast<double>(params.Psi.rows());
  if (!(params.m > 2.0 * n)) throw DomainError("inverse Wishart requires m > 2n");
  const SpdFactor Vf(V, "inverse Wishart argument");
  const SpdFactor Pf(params.Psi, "inverse Wishart Psi");
  const double a = 0.5 * (params.m - n - 1.0);
  return a * Pf.logdet() - 0.5 * trace_solve(Vf, params.Psi) - a * n * kLog2 -
         log_multigamma(static_cast<int>(n), a) - 0.5 * params.m * Vf.logdet();
}

namespace {

// Bartlett factor A of W ~ Wishart(nu, I); V = C A^{-T} A^{-1} C'.
Mat bartlett_factor(const Mat& C, double nu, CounterRng& rng) {
  const Eigen::Index n = C.rows();
  Mat A = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    boost::random::chi_squared_distribution<double> chi(nu - static_cast<double>(i));
    A(i, i) = std::sqrt(chi(rng));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  return C * A.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
}

Mat iw_scale_factor(const InvWishartParams& params) {
  require_square(params.Psi, "inverse Wishart Psi");
  const double n = static_cast<double>(params.Psi.rows());
  if (!(params.m > 2.0 * n)) throw DomainError("inverse Wishart requires m > 2n");
  return SpdFactor(params.Psi, "inverse Wishart Psi").matrixL();
}

}  // namespace

std::vector<Mat> invwishart_sample(const InvWishartParams& params, std::uint64_t seed,
                                   std::size_t count) {
  const Mat C = iw_scale_factor(params);
  const double nu = params.m - static_cast<double>(C.rows()) - 1.0;
  CounterRng rng(seed);
  std::vector<Mat> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Mat B = bartlett_factor(C, nu, rng);
    out.push_back(B * B.transpose());
  }
  return out;
}

Mat invwishart_sample_factor(const InvWishartParams& params, std::uint64_t seed) {
  const Mat C = iw_scale_factor(params);
  CounterRng rng(seed);
  return bartlett_factor(C, params.m - static_cast<double>(C.rows()) - 1.0, rng);
}

double matt_logpdf(const Mat& X, const MatTParams& params) {
  require_square(params.Sigma, "matrix t Sigma");
  require_square(params.Omega, "matrix t Omega");
  require_shape(params.M, params.Sigma.rows(), params.Omega.rows(), "matrix t location");
  require_shape(X, params.M.rows(), params.M.cols(), "matrix t argument");
  if (!(params.nu > 0.0)) throw DomainError("matrix t requires nu > 0");
  const SpdFactor S(params.Sigma, "matrix t Sigma");
  const SpdFactor O(params.Omega, "matrix t Omega");
  const int p = static_cast<int>(X.rows()), n = static_cast<int>(X.cols());
  // |I_p + A A'| = |I_n + A'A| with A = L_S^{-1} D L_O^{-T}; factor the smaller side.
  const Mat A = O.lower_solve(S.lower_solve(X - params.M).transpose()).transpose();
  const Mat G = (p <= n) ? Mat(Mat::Identity(p, p) + A * A.transpose())
                         : Mat(Mat::Identity(n, n) + A.transpose() * A);
  const double logdet = SpdFactor(G, "matrix t kernel").logdet();
  const double nu = params.nu;
  return log_multigamma(p, 0.5 * (nu + n + p - 1)) - 0.5 * n * p * kLogPi -
         log_multigamma(p, 0.5 * (nu + p - 1)) - 0.5 * n * S.logdet() - 0.5 * p * O.logdet() -
         0.5 * (nu + n + p - 1) * logdet;
}

}  // namespace matbf
