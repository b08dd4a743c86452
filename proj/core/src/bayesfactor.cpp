#include "matbf/bayesfactor.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "matbf/errors.hpp"
#include "matbf/matdist.hpp"

namespace matbf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kLog2 = 0.69314718055994531;

void check_alpha_open(double alpha, bool allow_one) {
  const bool ok = alpha > 0.0 && (allow_one ? alpha <= 1.0 : alpha < 1.0);
  if (!ok)
    throw DomainError(std::string("alpha must lie in (0, 1") + (allow_one ? "]" : ")") +
                      ", got " + std::to_string(alpha));
}

void check_known_shapes(const PosteriorKnownV& post, const KnownVModel& model) {
  require_shape(post.M_star, model.p(), model.n(), "posterior M_*");
  require_shape(post.Sigma_star, model.p(), model.p(), "posterior Sigma_*");
  require_shape(model.Sigma_L, model.p(), model.p(), "Sigma_L");
  require_shape(model.V, model.n(), model.n(), "V");
}

// Factorizations shared by the known-V evaluations.
struct KnownVTerms {
  SpdFactor Sd;   // Sigma_d
  SpdFactor SAd;  // Sigma_{A,d}
  SpdFactor Vf;
  double c = 0.0;  // 1/alpha - 1
  double log_kappa = 0.0;

  KnownVTerms(const PosteriorKnownV& post, const KnownVModel& model, double alpha) {
    check_known_shapes(post, model);
    const Mat Sigma_d = model.Sigma_L + post.Sigma_star;
    Sd = SpdFactor(Sigma_d, "Sigma_d");
    c = 1.0 / alpha - 1.0;
    SAd = SpdFactor(alpha == 1.0 ? Sigma_d : Mat(model.Sigma_L + post.Sigma_star / alpha),
                    "Sigma_{A,d}");
    Vf = SpdFactor(model.V, "V");
    // log|Sigma_Ad| - log|Sigma_d| = log|I + c L^{-1} Sigma_* L^{-T}|, L L' = Sigma_d.
    const Eigen::Index p = Sigma_d.rows();
    const Mat W = Sd.lower_solve(Sd.lower_solve(post.Sigma_star).transpose());
    const Mat G = Mat::Identity(p, p) + c * symmetrize(W);
    log_kappa = 0.5 * static_cast<double>(model.n()) * SpdFactor(G, "kappa kernel").logdet();
  }
};

BFEvaluation finish(long t, double alpha, double log_H, double log_kappa) {
  BFEvaluation e;
  e.t = t;
  e.alpha = alpha;
  e.log_H = log_H;
  e.log_kappa = log_kappa;
  e.H = std::exp(log_H);
  e.kappa = std::exp(log_kappa);
  return e;
}

}  // namespace

BFEvaluation bf_known_v(const Mat& Y, const PosteriorKnownV& post, const KnownVModel& model,
                        double alpha, long t) {
  check_alpha_open(alpha, true);
  check_known_shapes(post, model);
  require_shape(Y, model.p(), model.n(), "observation Y");
  const KnownVTerms k(post, model, alpha);
  // tr[(Sigma_d^{-1} - Sigma_Ad^{-1}) D V^{-1} D'] = c tr[V^{-1} (Sigma_d^{-1}D)' Sigma_* (Sigma_Ad^{-1}D)]
  const Mat D = Y - post.M_star;
  const Mat X = k.Sd.solve(D).transpose() * post.Sigma_star * k.SAd.solve(D);
  const double q = k.c * trace_solve(k.Vf, X);
  return finish(t, alpha, k.log_kappa - 0.5 * q, k.log_kappa);
}

double log_kappa_known_v(const PosteriorKnownV& post, const KnownVModel& model, double alpha) {
  check_alpha_open(alpha, true);
  return KnownVTerms(post, model, alpha).log_kappa;
}

double kappa_known_v(const PosteriorKnownV& post, const KnownVModel& model, double alpha) {
  return std::exp(log_kappa_known_v(post, model, alpha));
}

double log_norm_const_known_v(const PosteriorKnownV& post, const KnownVModel& model,
                              double alpha) {
  check_alpha_open(alpha, true);
  check_known_shapes(post, model);
  const double p = model.p(), n = model.n();
  const double ldS = SpdFactor(post.Sigma_star, "posterior Sigma_*").logdet();
  const double ldV = SpdFactor(model.V, "V").logdet();
  const double a1 = alpha - 1.0;
  return 0.5 * n * p * std::log(alpha) + 0.5 * a1 * n * p * kLog2Pi + 0.5 * a1 * n * ldS +
         0.5 * a1 * p * ldV;
}

double log_bf_derivative_known_v(const Mat& Y, const PosteriorKnownV& post,
                                 const KnownVModel& model, double alpha) {
  check_alpha_open(alpha, false);
  check_known_shapes(post, model);
  require_shape(Y, model.p(), model.n(), "observation Y");
  const KnownVTerms k(post, model, alpha);
  const double n = model.n();
  const Mat D = Y - post.M_star;
  const Mat R = k.SAd.solve(post.Sigma_star);  // Sigma_Ad^{-1} Sigma_*
  const Mat U = k.SAd.solve(D);                // Sigma_Ad^{-1} D
  // tr(Sigma_Ad^{-1} Sigma_* Sigma_Ad^{-1} D V^{-1} D') = tr(V^{-1} U' Sigma_* U)
  const double quad = trace_solve(k.Vf, U.transpose() * post.Sigma_star * U);
  return (-n * R.trace() + quad) / (2.0 * alpha * alpha);
}

double bf_derivative_known_v(const Mat& Y, const PosteriorKnownV& post,
                             const KnownVModel& model, double alpha) {
  const double dlog = log_bf_derivative_known_v(Y, post, model, alpha);
  return bf_known_v(Y, post, model, alpha).H * dlog;
}

double bf_derivative_known_v_trace_form(const Mat& Y, const PosteriorKnownV& post,
                                        const KnownVModel& model, double alpha) {
  check_alpha_open(alpha, false);
  check_known_shapes(post, model);
  require_shape(Y, model.p(), model.n(), "observation Y");
  const double n = model.n();
  const Mat D = Y - post.M_star;
  const SpdFactor Vf(model.V, "V");
  const Mat A = D * Vf.solve(D.transpose());  // Atilde
  const SpdFactor Bt(alpha * model.Sigma_L + post.Sigma_star, "Btilde");
  const SpdFactor Sd(model.Sigma_L + post.Sigma_star, "Sigma_d");
  const Mat BinvS = Bt.solve(post.Sigma_star);
  const Mat Ups = Sd.solve(post.Sigma_star * Bt.solve(Mat::Identity(model.p(), model.p())));
  const Mat inner = -n * BinvS + alpha * Ups * A +
                    alpha * (1.0 - alpha) * Ups * model.Sigma_L * Bt.solve(A);
  return bf_known_v(Y, post, model, alpha).H * inner.trace() / (2.0 * alpha);
}

// ---------------------------------------------------------------------------
// Unknown V

namespace {

// Y-dependent determinants in the Psi_*-whitened basis. With W = L^{-1} E L^{-T}
// (L L' = Psi_*) and eigenvalues mu of W:
//   log|Psi_d|  = log|Psi_*| + sum log(1 + r mu),     r   = k_* / k_d
//   log|Psi_Ad| = log|Psi_*| + sum log(alpha + r_A mu), r_A = k_A* / k_Ad
// This stays finite when E dwarfs Psi_* (a rank-p update need not refactor).
struct NiwTerms {
  PredictiveNIW pr;
  int p = 0, n = 0;
  double ld_star = 0.0;  // log|Psi_*|
  Vec mu;                // eigenvalues of W, clamped at 0

  NiwTerms(const Mat& Y, const PosteriorNIW& post, const NIWModel& model, double alpha)
      : pr(predictive_niw(post, model, alpha)), p(model.p()), n(model.n()) {
    require_shape(Y, p, n, "observation Y");
    const SpdFactor SL(model.Sigma_L, "Sigma_L");
    const SpdFactor Ps(post.Psi_star, "posterior Psi_*");
    const Mat D = post.M_star - Y;
    const Mat G = Ps.lower_solve(SL.lower_solve(D).transpose());  // W = G G'
    ld_star = Ps.logdet();
    far = !std::isfinite(G.squaredNorm());
    if (far) return;
    mu = Eigen::SelfAdjointEigenSolver<Mat>(symmetrize(G * G.transpose()), Eigen::EigenvaluesOnly)
             .eigenvalues()
             .cwiseMax(0.0);
  }

  // W overflows double range. log H ~ (m_Ad - m_d)/2 * sum log mu with
  // m_Ad < m_d for alpha < 1, so H has already reached its limit 0.
  bool far = false;

  double r_null() const { return pr.k_star / pr.k_d; }
  double r_alt() const { return pr.k_A_star / pr.k_A_d; }
  double logdet_d() const {
    double s = ld_star;
    for (Eigen::Index j = 0; j < mu.size(); ++j) s += std::log1p(r_null() * mu(j));
    return s;
  }
  double logdet_Ad() const {
    double s = ld_star;
    for (Eigen::Index j = 0; j < mu.size(); ++j) s += std::log(pr.alpha + r_alt() * mu(j));
    return s;
  }
};

// log kappa without the Y-dependent pieces; shared by kappa and G.
double log_kappa_terms(const PredictiveNIW& pr, int p, int n) {
  const double np2 = 0.5 * n * p;
  const double h = 0.5 * (n + 1.0);
  return np2 * (std::log(pr.k_star) + std::log(pr.k_A_d) - std::log(pr.k_d) -
                std::log(pr.k_A_star)) +
         log_multigamma(n, 0.5 * pr.m_d - h) + log_multigamma(n, 0.5 * pr.m_A_star - h) -
         log_multigamma(n, 0.5 * pr.m_star - h) - log_multigamma(n, 0.5 * pr.m_A_d - h);
}

}  // namespace

BFEvaluation bf_unknown_v(const Mat& Y, const PosteriorNIW& post, const NIWModel& model,
                          double alpha, long t) {
  const NiwTerms k(Y, post, model, alpha);
  const auto& pr = k.pr;
  const double log_kappa = log_kappa_terms(pr, k.p, k.n);
  if (k.far) {
    const double limit = alpha == 1.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return finish(t, alpha, limit, log_kappa);
  }
  const double n = k.n;
  const double ldPsi = k.ld_star;
  const double ldPsiA = n * std::log(alpha) + ldPsi;
  const double log_G = log_kappa + 0.5 * (pr.m_star - n - 1.0) * ldPsi -
                       0.5 * (pr.m_A_star - n - 1.0) * ldPsiA;
  const double log_H = log_G + 0.5 * (pr.m_A_d - n - 1.0) * k.logdet_Ad() -
                       0.5 * (pr.m_d - n - 1.0) * k.logdet_d();
  return finish(t, alpha, log_H, log_kappa);
}

double log_bf_unknown_v_predictive(const Mat& Y, const PosteriorNIW& post,
                                   const NIWModel& model, double alpha) {
  const PredictiveNIW pr = predictive_niw(post, model, alpha);
  return matt_logpdf(Y, pr.null_params()) - matt_logpdf(Y, pr.alt_params());
}

double log_kappa_unknown_v(const PosteriorNIW& post, const NIWModel& model, double alpha) {
  const PredictiveNIW pr = predictive_niw(post, model, alpha);
  return log_kappa_terms(pr, model.p(), model.n());
}

double kappa_unknown_v(const PosteriorNIW& post, const NIWModel& model, double alpha) {
  return std::exp(log_kappa_unknown_v(post, model, alpha));
}

double log_norm_const_unknown_v(const PosteriorNIW& post, const NIWModel& model,
                                double alpha) {
  const PredictiveNIW pr = predictive_niw(post, model, alpha);
  const double p = model.p(), n = model.n();
  const double ldPsi = SpdFactor(post.Psi_star, "posterior Psi_*").logdet();
  const double ldPsiA = n * std::log(alpha) + ldPsi;
  // Sigma_* = Sigma_L / k_*, Sigma_{A,*} = Sigma_* / alpha.
  const double ldS = SpdFactor(model.Sigma_L, "Sigma_L").logdet() - p * std::log(pr.k_star);
  const double ldSA = ldS - p * std::log(alpha);
  const double a_star = 0.5 * (pr.m_star - n - 1.0);
  const double a_A = 0.5 * (pr.m_A_star - n - 1.0);
  return a_A * ldPsiA + 0.5 * alpha * n * p * kLog2Pi + 0.5 * alpha * n * ldS +
         alpha * a_star * n * kLog2 + alpha * log_multigamma(static_cast<int>(n), a_star) -
         0.5 * n * p * kLog2Pi - 0.5 * n * ldSA - a_A * n * kLog2 -
         log_multigamma(static_cast<int>(n), a_A) - alpha * a_star * ldPsi;
}

double log_bf_derivative_unknown_v(const Mat& Y, const PosteriorNIW& post,
                                   const NIWModel& model, double alpha) {
  if (!(alpha < 1.0)) throw DomainError("derivative requires alpha < 1");
  const NiwTerms k(Y, post, model, alpha);
  if (k.far) throw NumericalError("unknown-V BF derivative: observation beyond double range");
  const auto& pr = k.pr;
  const double n = k.n, p = k.p;
  const double np2 = 0.5 * n * p;
  const double h = 0.5 * (n + 1.0);
  const double md2 = 0.5 * pr.m_d;  // d m_{A,*}/d alpha = d m_{A,d}/d alpha = m_d
  const double ldPsiA = n * std::log(alpha) + k.ld_star;
  // tr[Psi_Ad^{-1} dPsi_Ad/dalpha] with dPsi_Ad/dalpha = Psi_* + (k_* / k_Ad^2) E
  const double c = pr.k_star / (pr.k_A_d * pr.k_A_d);
  double tr = 0.0;
  for (Eigen::Index j = 0; j < k.mu.size(); ++j)
    tr += (1.0 + c * k.mu(j)) / (alpha + k.r_alt() * k.mu(j));
  return np2 * pr.k_star / pr.k_A_d                                      // a1'
         + md2 * multidigamma_sum(k.n, 0.5 * pr.m_A_star - h)            // a2'
         + md2 * k.logdet_Ad()                                           // a3', dof part
         + 0.5 * (pr.m_A_d - n - 1.0) * tr                               // a3', matrix part
         - np2 / alpha                                                   // b1'
         - md2 * multidigamma_sum(k.n, 0.5 * pr.m_A_d - h)               // b2'
         - md2 * ldPsiA - 0.5 * (pr.m_A_star - n - 1.0) * (n / alpha);   // b3'
}

double bf_derivative_unknown_v(const Mat& Y, const PosteriorNIW& post, const NIWModel& model,
                               double alpha) {
  const double dlog = log_bf_derivative_unknown_v(Y, post, model, alpha);
  return bf_unknown_v(Y, post, model, alpha).H * dlog;
}

// ---------------------------------------------------------------------------
// Acceptance ellipsoid

Mat sigma_h(const PosteriorKnownV& post, const KnownVModel& model, double alpha) {
  check_alpha_open(alpha, false);
  check_known_shapes(post, model);
  const SpdFactor S(post.Sigma_star, "posterior Sigma_*");
  const Mat Bt = alpha * model.Sigma_L + post.Sigma_star;
  return symmetrize(Bt * S.solve(model.Sigma_L + post.Sigma_star) / (1.0 - alpha));
}

double Ellipsoid::quad_form(const Mat& Y) const {
  require_shape(Y, center.rows(), center.cols(), "ellipsoid argument");
  const Mat C = zeta.transpose() * (Y - center) * delta;  // c_ij = zeta_i' D delta_j
  double q = 0.0;
  for (Eigen::Index j = 0; j < C.cols(); ++j)
    for (Eigen::Index i = 0; i < C.rows(); ++i) q += C(i, j) * C(i, j) / (gamma(i) * tau(j));
  return q;
}

bool Ellipsoid::contains(const Mat& Y, double tol) const {
  return quad_form(Y) <= radius_sq + tol * std::max(1.0, radius_sq);
}

Ellipsoid acceptance_ellipsoid(const PosteriorKnownV& post, const KnownVModel& model,
                               double alpha, double h0) {
  check_alpha_open(alpha, false);
  if (!(h0 > 0.0)) throw DomainError("acceptance_ellipsoid: h0 must be positive");
  const double log_kappa = log_kappa_known_v(post, model, alpha);
  const double r2 = 2.0 * (log_kappa - std::log(h0));
  if (r2 < -1e-12)
    throw DomainError("acceptance_ellipsoid: h0 = " + std::to_string(h0) +
                      " exceeds kappa = " + std::to_string(std::exp(log_kappa)) +
                      "; acceptance region is empty");
  Ellipsoid e;
  e.center = post.M_star;
  e.radius_sq = std::max(r2, 0.0);
  Eigen::SelfAdjointEigenSolver<Mat> eh(sigma_h(post, model, alpha));
  Eigen::SelfAdjointEigenSolver<Mat> ev(model.V);
  if (eh.info() != Eigen::Success || ev.info() != Eigen::Success)
    throw NumericalError("acceptance_ellipsoid: eigendecomposition failed");
  e.gamma = eh.eigenvalues();
  e.zeta = eh.eigenvectors();
  e.tau = ev.eigenvalues();
  e.delta = ev.eigenvectors();
  for (int i = 0; i < e.gamma.size(); ++i)
    for (int j = 0; j < e.tau.size(); ++j) {
      const double xi = e.gamma(i) * e.tau(j);
      e.axes.push_back({xi, 2.0 * std::sqrt(e.radius_sq * xi), i, j});
    }
  return e;
}

}  // namespace matbf
