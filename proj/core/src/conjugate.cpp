#include "matbf/conjugate.hpp"

#include <string>

#include "matbf/errors.hpp"

namespace matbf {

SuffStats::SuffStats(int p, int n) : mean_(Mat::Zero(p, n)) {}

SuffStats::SuffStats(int p, int n, const SpdFactor& sigma_l)
    : mean_(Mat::Zero(p, n)), scatter_(Mat::Zero(n, n)), sigma_l_(sigma_l), has_scatter_(true) {
  if (sigma_l.dim() != p) throw_shape("SuffStats: Sigma_L dimension differs from p");
}

void SuffStats::add(const Mat& Y) {
  require_shape(Y, mean_.rows(), mean_.cols(), "SuffStats observation");
  ++count_;
  const Mat before = Y - mean_;
  mean_ += before / static_cast<double>(count_);
  if (has_scatter_) {
    const Mat after = Y - mean_;
    scatter_ += before.transpose() * sigma_l_.solve(after);
  }
}

Mat SuffStats::scatter() const {
  if (!has_scatter_) throw std::logic_error("SuffStats: scatter requested without Sigma_L");
  return symmetrize(scatter_);
}

SuffStats suff_stats(const MatrixSeries& data) {
  SuffStats s(data.p(), data.n());
  for (const auto& o : data.obs()) s.add(o.Y);
  return s;
}

SuffStats suff_stats(const MatrixSeries& data, const SpdFactor& sigma_l) {
  SuffStats s(data.p(), data.n(), sigma_l);
  for (const auto& o : data.obs()) s.add(o.Y);
  return s;
}

namespace {

void check_data_shape(int p, int n, const MatrixSeries& data) {
  if (data.p() != p || data.n() != n)
    throw ShapeError("data shape " + std::to_string(data.p()) + "x" + std::to_string(data.n()) +
                     " differs from model shape " + std::to_string(p) + "x" + std::to_string(n));
}

void check_alpha_unit(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("alpha must lie in (0, 1], got " + std::to_string(alpha));
}

}  // namespace

PosteriorKnownV update_known_v(const KnownVModel& model, const MatrixSeries& data) {
  model.validate();
  check_data_shape(model.p(), model.n(), data);
  return update_known_v(model, suff_stats(data));
}

PosteriorKnownV update_known_v(const KnownVModel& model, const SuffStats& stats) {
  const double T = static_cast<double>(stats.count());
  PosteriorKnownV post;
  post.T = stats.count();
  if (stats.count() == 0) {
    post.M_star = model.M;
  } else {
    require_shape(stats.mean(), model.M.rows(), model.M.cols(), "SuffStats mean");
    post.M_star = (model.phi * model.M + T * stats.mean()) / (model.phi + T);
  }
  post.Sigma_star = model.Sigma_L / (model.phi + T);
  return post;
}

PosteriorKnownV update_known_v_stacked(const KnownVModel& model, const MatrixSeries& data) {
  model.validate();
  check_data_shape(model.p(), model.n(), data);
  const Eigen::Index p = model.p(), n = model.n();
  const Eigen::Index T = static_cast<Eigen::Index>(data.size());
  if (T > 5) throw DomainError("update_known_v_stacked: reference path limited to T <= 5");
  const Mat Sigma_P = model.Sigma_L / model.phi;
  if (T == 0) return {model.M, Sigma_P, 0};

  Mat X = Mat::Zero(T * p, p);  // iota_T (x) I_p
  Mat Ys(T * p, n);
  Mat K = Mat::Zero(T * p, T * p);  // I_T (x) Sigma_L
  for (Eigen::Index s = 0; s < T; ++s) {
    X.block(s * p, 0, p, p).setIdentity();
    Ys.block(s * p, 0, p, n) = data[static_cast<std::size_t>(s)].Y;
    K.block(s * p, s * p, p, p) = model.Sigma_L;
  }
  K += X * Sigma_P * X.transpose();
  const SpdFactor Kf(symmetrize(K), "stacked predictive covariance");
  const Mat G = Sigma_P * X.transpose();  // p x Tp
  PosteriorKnownV post;
  post.T = static_cast<long>(T);
  post.M_star = model.M + G * Kf.solve(Ys - X * model.M);
  post.Sigma_star = symmetrize(Sigma_P - G * Kf.solve(G.transpose()));
  return post;
}

PosteriorNIW update_niw(const NIWModel& model, const MatrixSeries& data) {
  model.validate();
  check_data_shape(model.p(), model.n(), data);
  const SpdFactor SL(model.Sigma_L, "NIWModel.Sigma_L");
  return update_niw(model, suff_stats(data, SL));
}

PosteriorNIW update_niw(const NIWModel& model, const SuffStats& stats) {
  const double k = model.k();
  const double T = static_cast<double>(stats.count());
  const double p = static_cast<double>(model.p()), n = static_cast<double>(model.n());
  PosteriorNIW post;
  post.T = stats.count();
  post.k_star = k + T;
  post.m_star = model.m + T * p;
  if (!(post.m_star > 2.0 * n))
    throw DomainError("update_niw: m + Tp must exceed 2n");
  if (stats.count() == 0) {
    post.M_star = model.M;
    post.Psi_star = model.Psi;
    return post;
  }
  if (!stats.has_scatter()) throw std::logic_error("update_niw: SuffStats lacks scatter");
  require_shape(stats.mean(), model.M.rows(), model.M.cols(), "SuffStats mean");
  const SpdFactor SL(model.Sigma_L, "NIWModel.Sigma_L");
  const Mat D = model.M - stats.mean();
  post.M_star = (k * model.M + T * stats.mean()) / (k + T);
  post.Psi_star =
      symmetrize(model.Psi + (k * T / (k + T)) * (D.transpose() * SL.solve(D)) + stats.scatter());
  if (!validate_spd(post.Psi_star))
    throw CovarianceError("update_niw: posterior Psi_* is not SPD (degenerate data)");
  return post;
}

PredictiveKnownV predictive_known_v(const PosteriorKnownV& post, const KnownVModel& model,
                                    double alpha) {
  check_alpha_unit(alpha);
  require_shape(post.Sigma_star, model.p(), model.p(), "posterior Sigma_*");
  require_shape(post.M_star, model.p(), model.n(), "posterior M_*");
  PredictiveKnownV pred;
  pred.alpha = alpha;
  pred.M_star = post.M_star;
  pred.Sigma_d = model.Sigma_L + post.Sigma_star;
  pred.Sigma_Ad = alpha == 1.0 ? pred.Sigma_d : Mat(model.Sigma_L + post.Sigma_star / alpha);
  pred.V = model.V;
  return pred;
}

double alpha_low_niw(const PosteriorNIW& post, int p, int n) {
  return (p + 2.0 * n) / (post.m_star + p);
}

PredictiveNIW predictive_niw(const PosteriorNIW& post, const NIWModel& model, double alpha) {
  const int p = model.p(), n = model.n();
  require_shape(post.M_star, p, n, "posterior M_*");
  require_shape(post.Psi_star, n, n, "posterior Psi_*");
  const double lo = alpha_low_niw(post, p, n);
  if (!(alpha > lo && alpha <= 1.0))
    throw DomainError("alpha must lie in (alpha_low, 1] with alpha_low = (p+2n)/m_d = " +
                      std::to_string(lo) + ", got " + std::to_string(alpha));
  PredictiveNIW pr;
  pr.alpha = alpha;
  pr.M_star = post.M_star;
  pr.Sigma_L = model.Sigma_L;
  pr.Psi_star = post.Psi_star;
  pr.Psi_A_star = alpha * post.Psi_star;
  pr.k_star = post.k_star;
  pr.k_d = post.k_star + 1.0;
  pr.k_A_star = alpha * post.k_star;
  pr.k_A_d = alpha * post.k_star + 1.0;
  pr.m_star = post.m_star;
  pr.m_d = post.m_star + p;
  pr.m_A_star = alpha * (post.m_star + p) - p;
  pr.m_A_d = pr.m_A_star + p;
  pr.nu_null = pr.m_star - 2.0 * n;
  pr.nu_alt = pr.m_A_star - 2.0 * n;
  pr.L_star = pr.Psi_star * (pr.k_d / pr.k_star);
  pr.L_A_star = pr.Psi_A_star * (pr.k_A_d / pr.k_A_star);
  return pr;
}

}  // namespace matbf
