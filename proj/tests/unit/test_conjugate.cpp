#include <doctest.h>

#include <boost/math/distributions/inverse_gamma.hpp>

#include "matbf/conjugate.hpp"
#include "matbf/errors.hpp"
#include "matbf/matdist.hpp"
#include "support.hpp"

using namespace matbf;
using doctest::Approx;

namespace {

// Dense Gaussian update of vec(B') with prior cov (Sigma_L/phi) (x) V and
// likelihood cov Sigma_L (x) V per observation.
std::pair<Mat, Mat> dense_posterior(const KnownVModel& m, const MatrixSeries& data) {
  const Mat K0 = test::kron(m.Sigma_L / m.phi, m.V);
  const Mat KL = test::kron(m.Sigma_L, m.V);
  Mat prec = K0.inverse();
  Vec rhs = prec * test::vec_rows(m.M);
  for (const auto& o : data.obs()) {
    prec += KL.inverse();
    rhs += KL.inverse() * test::vec_rows(o.Y);
  }
  const Mat cov = prec.inverse();
  const Vec mu = cov * rhs;
  Mat M(m.p(), m.n());
  for (int i = 0; i < m.p(); ++i)
    for (int j = 0; j < m.n(); ++j) M(i, j) = mu(i * m.n() + j);
  return {M, cov};
}

KnownVModel random_known(CounterRng& rng, int p, int n, double phi) {
  return {rng.normal_matrix(p, n), test::random_spd(rng, p), test::random_spd(rng, n), phi};
}

NIWModel random_niw(CounterRng& rng, int p, int n) {
  return {rng.normal_matrix(p, n), test::random_spd(rng, p), 1.5, 0.8,
          test::random_spd(rng, n), 2.0 * n + 3.0};
}

}  // namespace

TEST_CASE("known-V posterior: empty data and scalar example") {
  CounterRng rng(31);
  const KnownVModel m = random_known(rng, 3, 2, 2.5);
  const PosteriorKnownV post0 = update_known_v(m, MatrixSeries(3, 2));
  CHECK((post0.M_star - m.M).norm() == 0.0);
  CHECK((post0.Sigma_star - m.Sigma_L / 2.5).norm() < 1e-15);

  const KnownVModel s{Mat::Zero(1, 1), Mat::Constant(1, 1, 3.0), Mat::Identity(1, 1), 1.0};
  const PosteriorKnownV ps = update_known_v(s, test::series_from({Mat::Constant(1, 1, 2.0)}));
  CHECK(ps.M_star(0, 0) == Approx(1.0));
  CHECK(ps.Sigma_star(0, 0) == Approx(1.5));
}

TEST_CASE("known-V posterior equals the dense Gaussian update and the stacked path") {
  CounterRng rng(32);
  for (int T = 1; T <= 5; ++T) {
    const KnownVModel m = random_known(rng, 3, 2, 0.7 + T);
    std::vector<Mat> ys;
    for (int s = 0; s < T; ++s) ys.push_back(rng.normal_matrix(3, 2));
    const MatrixSeries data = test::series_from(ys);
    const PosteriorKnownV fast = update_known_v(m, data);
    const PosteriorKnownV stacked = update_known_v_stacked(m, data);
    const auto [M_dense, cov_dense] = dense_posterior(m, data);
    CHECK((fast.M_star - M_dense).norm() < 1e-10);
    CHECK((test::kron(fast.Sigma_star, m.V) - cov_dense).norm() < 1e-10);
    CHECK((fast.M_star - stacked.M_star).norm() < 1e-10);
    CHECK((fast.Sigma_star - stacked.Sigma_star).norm() < 1e-10);
    CHECK((fast.Sigma_star - m.Sigma_L / (m.phi + T)).norm() < 1e-12);
  }
}

TEST_CASE("sequential updates equal one batch update") {
  CounterRng rng(33);
  const KnownVModel m = random_known(rng, 2, 3, 1.3);
  const NIWModel w = random_niw(rng, 2, 3);
  std::vector<Mat> ys;
  for (int s = 0; s < 6; ++s) ys.push_back(rng.normal_matrix(2, 3));
  const MatrixSeries data = test::series_from(ys);

  const PosteriorKnownV batch = update_known_v(m, data);
  KnownVModel cur = m;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const PosteriorKnownV step = update_known_v(cur, data.slice(s, s + 1));
    cur.M = step.M_star;
    cur.phi += 1.0;
  }
  CHECK((cur.M - batch.M_star).norm() < 1e-10);
  CHECK((cur.Sigma_L / cur.phi - batch.Sigma_star).norm() < 1e-10);

  const PosteriorNIW nb = update_niw(w, data);
  NIWModel c = w;
  PosteriorNIW last;
  for (std::size_t s = 0; s < data.size(); ++s) {
    last = update_niw(c, data.slice(s, s + 1));
    c.M = last.M_star;
    c.phi = last.k_star / c.rho;
    c.m = last.m_star;
    c.Psi = last.Psi_star;
  }
  CHECK((last.M_star - nb.M_star).norm() < 1e-10);
  CHECK(last.k_star == Approx(nb.k_star));
  CHECK(last.m_star == Approx(nb.m_star));
  CHECK((last.Psi_star - nb.Psi_star).norm() < 1e-9 * nb.Psi_star.norm());
}

TEST_CASE("NIW posterior bookkeeping") {
  CounterRng rng(34);
  const NIWModel w = random_niw(rng, 3, 2);
  const PosteriorNIW p0 = update_niw(w, MatrixSeries(3, 2));
  CHECK(p0.k_star == Approx(w.k()));
  CHECK(p0.m_star == Approx(w.m));
  CHECK((p0.Psi_star - w.Psi).norm() == 0.0);

  const Mat Y = rng.normal_matrix(3, 2);
  const PosteriorNIW p1 = update_niw(w, test::series_from({Y}));
  const Mat D = w.M - Y;
  const Mat expect = w.Psi + w.k() / (w.k() + 1.0) * D.transpose() * w.Sigma_L.inverse() * D;
  CHECK((p1.Psi_star - expect).norm() < 1e-10);
  CHECK(p1.k_star == Approx(w.k() + 1.0));
  CHECK(p1.m_star == Approx(w.m + 3.0));

  std::vector<Mat> ys;
  for (int s = 0; s < 4; ++s) ys.push_back(rng.normal_matrix(3, 2));
  const PosteriorNIW p4 = update_niw(w, test::series_from(ys));
  CHECK(validate_spd(p4.Psi_star));
  CHECK(p4.m_star == Approx(w.m + 12.0));
}

TEST_CASE("NIW scalar case matches a two-dimensional quadrature posterior") {
  // p = n = 1: B | v ~ N(M, s v / k), v ~ IW_1(psi, m), Y_s | B, v ~ N(B, s v).
  const double M = 0.4, s = 1.3, k = 2.0, psi = 1.5, m = 5.0;
  const std::vector<double> y{1.1, -0.2, 0.7};
  const NIWModel w{Mat::Constant(1, 1, M), Mat::Constant(1, 1, s), k, 1.0,
                   Mat::Constant(1, 1, psi), m};
  std::vector<Mat> ys;
  for (double v : y) ys.push_back(Mat::Constant(1, 1, v));
  const PosteriorNIW post = update_niw(w, test::series_from(ys));

  auto log_joint = [&](double b, double v) {
    double l = invwishart_logpdf(Mat::Constant(1, 1, v), {Mat::Constant(1, 1, psi), m});
    l += -0.5 * std::log(2 * M_PI * s * v / k) - 0.5 * k * (b - M) * (b - M) / (s * v);
    for (double yy : y) l += -0.5 * std::log(2 * M_PI * s * v) - 0.5 * (yy - b) * (yy - b) / (s * v);
    return l;
  };
  auto moment = [&](int which) {
    return test::integrate(
        [&](double u) {  // v = u / (1 - u) maps (0, 1) onto (0, inf)
          const double v = u / (1.0 - u), jac = 1.0 / ((1.0 - u) * (1.0 - u));
          return jac * test::integrate(
                           [&](double b) {
                             const double d = std::exp(log_joint(b, v));
                             return which == 0 ? d : (which == 1 ? b * d : v * d);
                           },
                           -15.0, 15.0, 1e-12);
        },
        1e-9, 1.0 - 1e-9, 1e-10);
  };
  const double Z = moment(0);
  CHECK(moment(1) / Z == Approx(post.M_star(0, 0)).epsilon(1e-7));
  // E[v | data] = Psi_* / (m_* - 4) for the n = 1 inverse Wishart
  CHECK(moment(2) / Z == Approx(post.Psi_star(0, 0) / (post.m_star - 4.0)).epsilon(1e-6));
}

TEST_CASE("predictive bookkeeping") {
  CounterRng rng(35);
  const KnownVModel m = random_known(rng, 2, 2, 3.0);
  const PosteriorKnownV post = update_known_v(m, test::series_from({rng.normal_matrix(2, 2)}));
  const PredictiveKnownV one = predictive_known_v(post, m, 1.0);
  CHECK((one.Sigma_Ad - one.Sigma_d).norm() == 0.0);
  const PredictiveKnownV half = predictive_known_v(post, m, 0.5);
  CHECK(validate_spd(half.Sigma_Ad - half.Sigma_d));
  CHECK_THROWS_AS(predictive_known_v(post, m, 0.0), DomainError);
  CHECK_THROWS_AS(predictive_known_v(post, m, 1.5), DomainError);

  // univariate predictive variance sigma^2 (1 + 1/(phi + T))
  const KnownVModel s{Mat::Zero(1, 1), Mat::Constant(1, 1, 2.0), Mat::Identity(1, 1), 1.0};
  const auto ps = update_known_v(s, test::series_from({Mat::Constant(1, 1, 0.3),
                                                       Mat::Constant(1, 1, -0.1)}));
  CHECK(predictive_known_v(ps, s, 1.0).Sigma_d(0, 0) == Approx(2.0 * (1.0 + 1.0 / 3.0)));

  const NIWModel w{Mat::Zero(2, 2), Mat::Identity(2, 2), 1.0, 1.0, Mat::Identity(2, 2), 10.0};
  std::vector<Mat> ys;
  for (int i = 0; i < 3; ++i) ys.push_back(rng.normal_matrix(2, 2));
  const PosteriorNIW pn = update_niw(w, test::series_from(ys));
  CHECK(alpha_low_niw(pn, 2, 2) == Approx(1.0 / 3.0));
  CHECK_THROWS_AS(predictive_niw(pn, w, 1.0 / 3.0), DomainError);
  const PredictiveNIW pr = predictive_niw(pn, w, 0.6);
  CHECK(pr.k_d == Approx(pn.k_star + 1.0));
  CHECK(pr.k_A_star == Approx(0.6 * pn.k_star));
  CHECK(pr.k_A_d == Approx(0.6 * pn.k_star + 1.0));
  CHECK(pr.m_d == Approx(pn.m_star + 2.0));
  CHECK(pr.m_A_star == Approx(0.6 * (pn.m_star + 2.0) - 2.0));
  CHECK(pr.m_A_d == Approx(pr.m_A_star + 2.0));
  const PredictiveNIW p1 = predictive_niw(pn, w, 1.0);
  CHECK((p1.L_A_star - p1.L_star).norm() < 1e-12);
  CHECK(p1.nu_alt == Approx(p1.nu_null));
}

TEST_CASE("known-V predictives match Monte Carlo marginalization") {
  CounterRng rng(36);
  const KnownVModel m = random_known(rng, 2, 2, 2.0);
  const PosteriorKnownV post = update_known_v(m, test::series_from({rng.normal_matrix(2, 2)}));
  const Mat Y = post.M_star + 0.8 * rng.normal_matrix(2, 2);
  const double alpha = 0.4;
  const PredictiveKnownV pr = predictive_known_v(post, m, alpha);
  const std::size_t N = 100000;

  auto mc = [&](const std::vector<Mat>& Bs) {
    double s = 0.0, s2 = 0.0;
    for (const auto& B : Bs) {
      const double d = std::exp(matnorm_logpdf(Y, {B, m.Sigma_L, m.V}));
      s += d;
      s2 += d * d;
    }
    const double mean = s / N;
    return std::pair{mean, std::sqrt((s2 / N - mean * mean) / N)};
  };
  // null: B ~ N(M_*, Sigma_*, V)
  const auto [null_mc, null_se] = mc(matnorm_sample({post.M_star, post.Sigma_star, m.V}, 3, N));
  CHECK(std::abs(null_mc - std::exp(matnorm_logpdf(Y, pr.null_params()))) < 3.0 * null_se);

  // hierarchical alternative: M~ ~ N(M_*, Sigma_*(1/alpha - 1), V), B ~ N(M~, Sigma_*, V)
  const auto centers =
      matnorm_sample({post.M_star, post.Sigma_star * (1.0 / alpha - 1.0), m.V}, 4, N);
  const Mat A = post.Sigma_star.llt().matrixL(), Bv = m.V.llt().matrixL();
  CounterRng z(5);
  std::vector<Mat> Bs;
  Bs.reserve(N);
  for (const auto& c : centers) Bs.push_back(c + A * z.normal_matrix(2, 2) * Bv.transpose());
  const auto [alt_mc, alt_se] = mc(Bs);
  CHECK(std::abs(alt_mc - std::exp(matnorm_logpdf(Y, pr.alt_params()))) < 3.0 * alt_se);
}

TEST_CASE("NIW null predictive matches Monte Carlo marginalization (p = n = 1)") {
  const NIWModel w{Mat::Constant(1, 1, 0.2), Mat::Constant(1, 1, 1.4), 2.0, 1.0,
                   Mat::Constant(1, 1, 1.1), 4.0};
  const PosteriorNIW post = update_niw(
      w, test::series_from({Mat::Constant(1, 1, 0.9), Mat::Constant(1, 1, -0.4)}));
  const PredictiveNIW pr = predictive_niw(post, w, 1.0);
  const double Y = 1.3, s = 1.4;
  // v ~ IW_1(Psi_*, m_*) is inverse gamma with shape (m_* - 2)/2, scale Psi_*/2.
  boost::math::inverse_gamma_distribution<double> ig(0.5 * (post.m_star - 2.0),
                                                     0.5 * post.Psi_star(0, 0));
  CounterRng rng(37);
  const std::size_t N = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double v = boost::math::quantile(ig, rng.uniform());
    const double b = post.M_star(0, 0) + std::sqrt(s * v / post.k_star) * rng.normal();
    const double d = std::exp(-0.5 * (Y - b) * (Y - b) / (s * v)) / std::sqrt(2 * M_PI * s * v);
    sum += d;
    sum2 += d * d;
  }
  const double mean = sum / N, se = std::sqrt((sum2 / N - mean * mean) / N);
  CHECK(std::abs(mean - std::exp(matt_logpdf(Mat::Constant(1, 1, Y), pr.null_params()))) <
        3.0 * se);
}

TEST_CASE("shape errors precede numerical work") {
  CounterRng rng(38);
  const KnownVModel m = random_known(rng, 2, 2, 1.0);
  CHECK_THROWS_AS(update_known_v(m, MatrixSeries(3, 2)), ShapeError);
  const NIWModel w = random_niw(rng, 2, 2);
  CHECK_THROWS_AS(update_niw(w, MatrixSeries(2, 3)), ShapeError);
}
