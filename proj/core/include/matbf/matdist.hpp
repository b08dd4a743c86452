#pragma once

#include <cstdint>
#include <vector>

#include "matbf/linalg.hpp"

namespace matbf {

// Matrix normal N_{p,n}(M, Sigma, Psi_col): vec(X') ~ N(vec(M'), Sigma (x) Psi_col).
struct MatNormParams {
  Mat M;
  Mat Sigma;    // p x p row covariance
  Mat Psi_col;  // n x n column covariance
};

// Inverse Wishart with density
//   |Psi|^{(m-n-1)/2} etr(-Psi V^{-1}/2) / (2^{(m-n-1)n/2} Gamma_n((m-n-1)/2) |V|^{m/2}),
// i.e. the usual IW with nu = m - n - 1 degrees of freedom. Requires m > 2n.
struct InvWishartParams {
  Mat Psi;
  double m = 0.0;
};

// Matrix Student-t T_{p,n}(nu, M, Sigma, Omega), Gupta-Nagar parametrization:
//   Gamma_p((nu+n+p-1)/2) / (pi^{np/2} Gamma_p((nu+p-1)/2)) |Sigma|^{-n/2} |Omega|^{-p/2}
//   |I_p + Sigma^{-1}(X-M) Omega^{-1} (X-M)'|^{-(nu+n+p-1)/2}.
struct MatTParams {
  double nu = 1.0;
  Mat M;
  Mat Sigma;  // p x p
  Mat Omega;  // n x n
};

double matnorm_logpdf(const Mat& X, const MatNormParams& params);
std::vector<Mat> matnorm_sample(const MatNormParams& params, std::uint64_t seed,
                                std::size_t count);

double invwishart_logpdf(const Mat& V, const InvWishartParams& params);
std::vector<Mat> invwishart_sample(const InvWishartParams& params, std::uint64_t seed,
                                   std::size_t count);
/// One draw returned as a factor B with V = B B'. Usable where V itself is too
/// ill-conditioned to refactor (degrees of freedom m - 2n close to zero).
Mat invwishart_sample_factor(const InvWishartParams& params, std::uint64_t seed);

double matt_logpdf(const Mat& X, const MatTParams& params);

/// log Gamma_n(a); DomainError when a <= (n-1)/2.
double log_multigamma(int n, double a);
/// d/da log Gamma_n(a) = sum_{j=1}^n digamma(a + (1-j)/2).
double multidigamma_sum(int n, double a);

}  // namespace matbf
