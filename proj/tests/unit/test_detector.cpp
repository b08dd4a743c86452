#include <doctest.h>

#include <sstream>

#include "matbf/detector.hpp"
#include "matbf/errors.hpp"
#include "matbf/report.hpp"
#include "matbf/simlab.hpp"
#include "matbf/univariate.hpp"
#include "support.hpp"

using namespace matbf;
using doctest::Approx;

namespace {

MatrixSeries clean_series(int p, int n, long T, std::uint64_t seed) {
  CounterRng rng(seed);
  const Mat Sigma = test::random_spd(rng, p);
  return test::simulate_series(rng.normal_matrix(p, n), Sigma, Mat::Identity(n, n), T, seed);
}

std::string report_json(const DecisionReport& r) {
  std::ostringstream os;
  write_report_json(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("clean series: rejection frequency near the size") {
  DetectorConfig c;
  c.window = 50;
  c.tau = 0.01;
  c.robust = false;
  c.classical = false;
  long rejected = 0, total = 0;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const DecisionReport r = run_sequential(clean_series(3, 2, 200, seed), c);
    CHECK(r.rows.size() == 150);
    for (const auto& row : r.rows) {
      rejected += row.decision == Decision::reject_null;
      ++total;
      CHECK(row.log_H <= row.log_kappa + 1e-12);
    }
  }
  // least-squares Sigma_L and window overlap add dispersion; allow 4 s.e.
  const double freq = double(rejected) / total, se = std::sqrt(0.01 * 0.99 / total);
  CHECK(freq < 0.01 + 4.0 * se);
}

TEST_CASE("planted gross outlier is rejected") {
  Scenario sc;
  sc.p = 6;
  sc.n = 3;
  sc.u = 15.0;
  sc.seed = 5;
  const ScenarioDraw d = generate_scenario_draw(sc);
  DetectorConfig c;
  c.window = 79;
  c.V = d.G * d.G.transpose();
  c.classical = false;
  const DecisionReport r = run_sequential(d.series, c);
  bool seen = false;
  for (const auto& row : r.rows)
    if (row.t == 80) {
      seen = true;
      CHECK(row.decision == Decision::reject_null);
      CHECK(row.jeffreys == "decisive");
      CHECK(row.mbf.log_mbf <= row.log_H + 1e-9);
    }
  CHECK(seen);
}

TEST_CASE("detector input errors") {
  MatrixSeries constant(2, 2);
  for (long t = 1; t <= 20; ++t) constant.push_back(t, Mat::Ones(2, 2));
  DetectorConfig c;
  c.window = 10;
  CHECK_THROWS_AS(run_sequential(constant, c), CovarianceError);
  c.window = 20;
  CHECK_THROWS_AS(run_sequential(clean_series(2, 2, 20, 1), c), InputError);
  c.window = 1;
  CHECK_THROWS_AS(c.validate(), InputError);
  DetectorConfig u;
  u.sigma_estimator = SigmaEstimator::user_supplied;
  CHECK_THROWS_AS(u.validate(), InputError);
}

TEST_CASE("alpha curve: endpoints, bound and scalar closed form") {
  const MatrixSeries s = clean_series(1, 1, 30, 7);
  DetectorConfig c;
  c.window = 20;
  c.sigma_estimator = SigmaEstimator::user_supplied;
  c.sigma_l = Mat::Constant(1, 1, 1.7);
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.9, 1.0};
  const long t = s[20].t;  // first evaluable observation
  const auto curve = bf_alpha_curve(s, c, t, grid);
  REQUIRE(curve.size() == grid.size());
  CHECK(curve.back().H == Approx(1.0));
  CHECK(curve.back().kappa == Approx(1.0));
  // first window: prior mean = window mean, phi = w, so m_* is the window mean and K = 2w
  double ybar = 0.0;
  for (std::size_t i = 0; i < 20; ++i) ybar += s[i].Y(0, 0);
  ybar /= 20.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(curve[i].log_H <= curve[i].log_kappa + 1e-12);
    const UnivBF u = univ_bf_closed_form(s[20].Y(0, 0), ybar, std::sqrt(1.7), 20.0, 21, grid[i]);
    CHECK(curve[i].log_H == Approx(u.log_H).epsilon(1e-10));
  }
}

TEST_CASE("report content and determinism") {
  const MatrixSeries s = clean_series(3, 2, 70, 8);
  DetectorConfig c;
  c.window = 40;
  c.alpha_fixed = {0.75, 0.9};
  c.curve_grid = {0.5, 1.0};
  const DecisionReport a = run_sequential(s, c), b = run_sequential(s, c);
  CHECK(report_json(a) == report_json(b));
  REQUIRE(a.classical.has_value());
  CHECK(a.weights.size() == 2);
  for (const auto& row : a.rows) {
    CHECK(row.log_H_fixed.size() == 2);
    CHECK(row.curve.size() == 2);
    CHECK(row.ibf.size() == 2);
    CHECK(row.nibf.size() == 2);
    CHECK(row.robust_error.empty());
    CHECK(row.mbf.log_mbf <= row.log_H + 1e-9);
    const Decision d = decide_log(row.log_H, a.calibration);
    CHECK(d == row.decision);
  }
}

TEST_CASE("decisions are invariant to rescaling the data") {
  const MatrixSeries s = clean_series(3, 2, 90, 9);
  DetectorConfig c;
  c.window = 30;
  c.robust = false;
  c.classical = false;
  std::vector<Decision> base;
  for (const auto& r : run_sequential(s, c).rows) base.push_back(r.decision);
  for (double k : {0.1, 10.0}) {
    MatrixSeries scaled(3, 2);
    for (const auto& o : s.obs()) scaled.push_back(o.t, k * o.Y);
    std::vector<Decision> got;
    for (const auto& r : run_sequential(scaled, c).rows) got.push_back(r.decision);
    CHECK(got == base);
  }
}

TEST_CASE("unknown-V regime") {
  const MatrixSeries s = clean_series(2, 2, 45, 10);
  DetectorConfig c;
  c.window = 30;
  c.regime = Regime::unknown_v;
  c.mc_draws = 2000;
  c.classical = false;
  const DecisionReport r = run_sequential(s, c);
  CHECK(r.rows.size() == 15);
  for (const auto& row : r.rows) {
    CHECK(row.log_H <= row.log_kappa + 1e-10);
    CHECK(row.alpha_star == Approx(r.calibration.alpha_star));
  }
  DetectorConfig bad = c;
  bad.V = Mat::Identity(2, 2);
  CHECK_THROWS_AS(run_sequential(s, bad), InputError);
}

TEST_CASE("least-squares Sigma_L") {
  CounterRng rng(11);
  MatrixSeries w(2, 3);
  for (long t = 1; t <= 4; ++t) w.push_back(t, rng.normal_matrix(2, 3));
  const Mat V = test::random_spd(rng, 3);
  Mat mean = Mat::Zero(2, 3);
  for (const auto& o : w.obs()) mean += o.Y / 4.0;
  Mat S = Mat::Zero(2, 2);
  for (const auto& o : w.obs()) S += (o.Y - mean) * V.inverse() * (o.Y - mean).transpose();
  S /= 3.0 * 3.0;
  S += 1e-8 * S.trace() / 2.0 * Mat::Identity(2, 2);
  CHECK((estimate_sigma_l(w, V) - S).norm() < 1e-12);
}
