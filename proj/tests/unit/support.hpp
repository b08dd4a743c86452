#pragma once

// Helpers shared by the unit tests. Oracles here must not call into the
// library code paths they are used to check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "matbf/linalg.hpp"
#include "matbf/rng.hpp"
#include "matbf/types.hpp"

namespace matbf::test {

inline Mat random_matrix(CounterRng& rng, Eigen::Index r, Eigen::Index c) {
  return rng.normal_matrix(r, c);
}

/// A A' / d + ridge I, well conditioned for small d.
inline Mat random_spd(CounterRng& rng, Eigen::Index d, double ridge = 0.5) {
  const Mat A = rng.normal_matrix(d, d);
  return A * A.transpose() / static_cast<double>(d) + ridge * Mat::Identity(d, d);
}

inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

/// vec(X') stacks the rows of X.
inline Vec vec_rows(const Mat& X) {
  Vec v(X.size());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = 0; j < X.cols(); ++j) v(i * X.cols() + j) = X(i, j);
  return v;
}

/// Dense multivariate normal log-density through an explicit inverse.
inline double mvn_logpdf_dense(const Vec& x, const Vec& mu, const Mat& S) {
  const double k = static_cast<double>(x.size());
  const Vec d = x - mu;
  const double q = d.dot(S.inverse() * d);
  return -0.5 * q - 0.5 * k * std::log(2.0 * M_PI) - 0.5 * std::log(S.determinant());
}

/// Adaptive Gauss-Kronrod on a finite interval.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

/// Tanh-sinh; tolerates integrable endpoint singularities.
inline double integrate_singular(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b);
}

inline MatrixSeries series_from(const std::vector<Mat>& ys, long t0 = 1) {
  MatrixSeries s(static_cast<int>(ys.front().rows()), static_cast<int>(ys.front().cols()));
  long t = t0;
  for (const auto& y : ys) s.push_back(t++, y);
  return s;
}

/// Matrix-normal series with mean M, row scale S S', column scale G G'.
inline MatrixSeries simulate_series(const Mat& M, const Mat& Sigma, const Mat& Psi, long T,
                                    std::uint64_t seed) {
  const Mat A = Sigma.llt().matrixL();
  const Mat B = Psi.llt().matrixL();
  CounterRng rng(seed, 99);
  MatrixSeries s(static_cast<int>(M.rows()), static_cast<int>(M.cols()));
  for (long t = 1; t <= T; ++t)
    s.push_back(t, M + A * rng.normal_matrix(M.rows(), M.cols()) * B.transpose());
  return s;
}

}  // namespace matbf::test
