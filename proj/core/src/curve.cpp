#include "matbf/curve.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "matbf/errors.hpp"
#include "matbf/matdist.hpp"

namespace matbf {

KnownVCurve::KnownVCurve(const Mat& Y, const PosteriorKnownV& post, const KnownVModel& model)
    : n_(model.n()) {
  require_shape(Y, model.p(), model.n(), "observation Y");
  require_shape(post.M_star, model.p(), model.n(), "posterior M_*");
  require_shape(post.Sigma_star, model.p(), model.p(), "posterior Sigma_*");
  const SpdFactor SL(model.Sigma_L, "Sigma_L");
  const SpdFactor Vf(model.V, "V");
  const Mat W = symmetrize(SL.lower_solve(SL.lower_solve(post.Sigma_star).transpose()));
  Eigen::SelfAdjointEigenSolver<Mat> es(W);
  if (es.info() != Eigen::Success) throw NumericalError("KnownVCurve: eigensolver failed");
  lambda_ = es.eigenvalues();
  const Mat Z = es.eigenvectors().transpose() * SL.lower_solve(Y - post.M_star);  // p x n
  w_ = (Z * Vf.solve(Z.transpose())).diagonal();
}

double KnownVCurve::log_kappa(double alpha) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lambda_.size(); ++i)
    s += std::log1p(lambda_(i) / alpha) - std::log1p(lambda_(i));
  return 0.5 * n_ * s;
}

double KnownVCurve::log_H(double alpha) const {
  double q = 0.0;
  for (Eigen::Index i = 0; i < lambda_.size(); ++i) {
    const double l = lambda_(i);
    // 1/(1+l) - 1/(1+l/alpha) = (l/alpha - l) / ((1+l)(1+l/alpha))
    q += w_(i) * (l / alpha - l) / ((1.0 + l) * (1.0 + l / alpha));
  }
  return log_kappa(alpha) - 0.5 * q;
}

double KnownVCurve::dlog_H(double alpha) const {
  double s = 0.0;
  const double a2 = alpha * alpha;
  for (Eigen::Index i = 0; i < lambda_.size(); ++i) {
    const double l = lambda_(i);
    const double g = 1.0 + l / alpha;
    s += -0.5 * n_ * l / (a2 * g) + 0.5 * w_(i) * l / (a2 * g * g);
  }
  return s;
}

UnknownVCurve::UnknownVCurve(const Mat& Y, const PosteriorNIW& post, const NIWModel& model)
    : p_(model.p()), n_(model.n()), k_star_(post.k_star), m_star_(post.m_star) {
  require_shape(Y, p_, n_, "observation Y");
  require_shape(post.M_star, p_, n_, "posterior M_*");
  require_shape(post.Psi_star, n_, n_, "posterior Psi_*");
  const SpdFactor SL(model.Sigma_L, "Sigma_L");
  const SpdFactor Pf(post.Psi_star, "posterior Psi_*");
  logdet_psi_ = Pf.logdet();
  alpha_low_ = alpha_low_niw(post, p_, n_);
  const Mat D = SL.lower_solve(post.M_star - Y);
  const Mat C = Pf.lower_solve(D.transpose());  // n x p
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(C * C.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("UnknownVCurve: eigensolver failed");
  mu_ = es.eigenvalues().cwiseMax(0.0);
}

namespace {

struct NiwScalars {
  double k_star, k_d, k_A_star, k_A_d, m_star, m_d, m_A_star, m_A_d;
};

NiwScalars niw_scalars(double k_star, double m_star, int p, double alpha) {
  NiwScalars s{};
  s.k_star = k_star;
  s.k_d = k_star + 1.0;
  s.k_A_star = alpha * k_star;
  s.k_A_d = alpha * k_star + 1.0;
  s.m_star = m_star;
  s.m_d = m_star + p;
  s.m_A_star = alpha * (m_star + p) - p;
  s.m_A_d = s.m_A_star + p;
  return s;
}

}  // namespace

double UnknownVCurve::log_kappa(double alpha) const {
  if (!(alpha > alpha_low_ && alpha <= 1.0))
    throw DomainError("alpha must lie in (alpha_low, 1], alpha_low = " + std::to_string(alpha_low_));
  const NiwScalars s = niw_scalars(k_star_, m_star_, p_, alpha);
  const double h = 0.5 * (n_ + 1.0);
  return 0.5 * n_ * p_ *
             (std::log(s.k_star) + std::log(s.k_A_d) - std::log(s.k_d) - std::log(s.k_A_star)) +
         log_multigamma(n_, 0.5 * s.m_d - h) + log_multigamma(n_, 0.5 * s.m_A_star - h) -
         log_multigamma(n_, 0.5 * s.m_star - h) - log_multigamma(n_, 0.5 * s.m_A_d - h);
}

double UnknownVCurve::log_H(double alpha) const {
  const double lk = log_kappa(alpha);
  const NiwScalars s = niw_scalars(k_star_, m_star_, p_, alpha);
  const double n = n_;
  const double r_null = s.k_star / s.k_d, r_alt = s.k_A_star / s.k_A_d;
  // log|Psi_d| - log|Psi_*| and log|Psi_Ad| - log|Psi_*|
  double ld_null = 0.0, ld_alt = 0.0;
  for (Eigen::Index j = 0; j < mu_.size(); ++j) {
    ld_null += std::log1p(r_null * mu_(j));
    ld_alt += std::log(alpha + r_alt * mu_(j));
  }
  const double ldPsiA = n * std::log(alpha) + logdet_psi_;
  const double log_G =
      lk + 0.5 * (s.m_star - n - 1.0) * logdet_psi_ - 0.5 * (s.m_A_star - n - 1.0) * ldPsiA;
  return log_G + 0.5 * (s.m_A_d - n - 1.0) * (logdet_psi_ + ld_alt) -
         0.5 * (s.m_d - n - 1.0) * (logdet_psi_ + ld_null);
}

double UnknownVCurve::dlog_H(double alpha) const {
  if (!(alpha > alpha_low_ && alpha < 1.0))
    throw DomainError("derivative requires alpha in (alpha_low, 1)");
  const NiwScalars s = niw_scalars(k_star_, m_star_, p_, alpha);
  const double n = n_, p = p_;
  const double np2 = 0.5 * n * p;
  const double h = 0.5 * (n + 1.0);
  const double md2 = 0.5 * s.m_d;
  const double r_alt = s.k_A_star / s.k_A_d;
  double ld_alt = 0.0, tr = 0.0;
  for (Eigen::Index j = 0; j < mu_.size(); ++j) {
    const double g = alpha + r_alt * mu_(j);
    ld_alt += std::log(g);
    tr += (1.0 + s.k_star * mu_(j) / (s.k_A_d * s.k_A_d)) / g;
  }
  const double ldPsiAd = logdet_psi_ + ld_alt;
  const double ldPsiA = n * std::log(alpha) + logdet_psi_;
  return np2 * s.k_star / s.k_A_d + md2 * multidigamma_sum(n_, 0.5 * s.m_A_star - h) +
         md2 * ldPsiAd + 0.5 * (s.m_A_d - n - 1.0) * tr - np2 / alpha -
         md2 * multidigamma_sum(n_, 0.5 * s.m_A_d - h) - md2 * ldPsiA -
         0.5 * (s.m_A_star - n - 1.0) * (n / alpha);
}

}  // namespace matbf
