#include <doctest.h>

#include <sstream>

#include "matbf/errors.hpp"
#include "matbf/parallel.hpp"
#include "matbf/simlab.hpp"
#include "support.hpp"

using namespace matbf;
using doctest::Approx;

TEST_CASE("scenario defaults") {
  const Scenario c1 = case1(), c2 = case2();
  CHECK(c1.p == 30);
  CHECK(c1.n == 10);
  CHECK(c1.replications == 100);
  CHECK(c2.p == 50);
  CHECK(c2.n == 50);
  CHECK(c2.replications == 25);
  CHECK(c1.T == 100);
  CHECK(c1.outlier_time == 80);
}

TEST_CASE("masks") {
  Scenario sc;
  sc.mask = MaskKind::random_entries;
  sc.mask_entries = 50;
  CHECK(make_mask(sc, 3).sum() == 50.0);
  sc.mask = MaskKind::row_col;
  sc.mask_rows = 20;
  sc.mask_cols = 10;
  const Mat R = make_mask(sc, 4);
  CHECK(R.sum() == 200.0);
  CHECK((R.array() * (1.0 - R.array())).abs().maxCoeff() == 0.0);
  sc.mask_rows = 5;
  sc.mask_cols = 2;
  const Mat R2 = make_mask(sc, 5);
  CHECK((R2.rowwise().sum().array() > 0).count() == 5);
  CHECK((R2.colwise().sum().array() > 0).count() == 2);
  sc.mask_rows = 31;
  CHECK_THROWS(sc.validate());
}

TEST_CASE("outlier is planted only at the outlier time") {
  Scenario null_sc;
  null_sc.p = 4;
  null_sc.n = 3;
  null_sc.seed = 12;
  Scenario alt = null_sc;
  alt.u = 5.0;
  const ScenarioDraw a = generate_scenario_draw(null_sc, 2), b = generate_scenario_draw(alt, 2);
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    const Mat diff = b.series[i].Y - a.series[i].Y;
    if (a.series[i].t == 80)
      CHECK((diff - 5.0 * b.R).norm() < 1e-12);
    else
      CHECK(diff.norm() == 0.0);
  }
  CHECK((generate_scenario(null_sc, 2)[10].Y - a.series[10].Y).norm() == 0.0);
  CHECK((generate_scenario(null_sc, 3)[10].Y - a.series[10].Y).norm() > 0.0);
}

TEST_CASE("noise covariance matches the Kronecker product") {
  Scenario sc;
  sc.p = 3;
  sc.n = 2;
  sc.T = 10000;
  sc.outlier_time = 1;
  sc.seed = 13;
  const ScenarioDraw d = generate_scenario_draw(sc);
  Mat cov = Mat::Zero(6, 6);
  for (const auto& o : d.series.obs()) {
    const Vec e = test::vec_rows(o.Y - d.M);
    cov += e * e.transpose();
  }
  cov /= static_cast<double>(sc.T);
  const Mat K = test::kron(d.S * d.S.transpose(), d.G * d.G.transpose());
  CHECK((cov - K).norm() / K.norm() < 0.05);
}

TEST_CASE("probability estimates") {
  Scenario sc;
  sc.p = 5;
  sc.n = 3;
  sc.u = 15.0;
  sc.replications = 8;
  sc.seed = 14;
  SimConfig cfg;
  const PowerTable t = estimate_probabilities(sc, cfg);
  CHECK(t.J == 8);
  CHECK(t.alternative.p_III == 1.0);
  for (const ProbabilityCell& c : {t.alternative, t.null}) {
    CHECK(c.p_I + c.p_II + c.p_III == Approx(1.0).epsilon(1e-15));
    CHECK(c.p_I >= 0.0);
    CHECK(c.p_II >= 0.0);
  }
  CHECK(t.null.count == 8 * 20);  // t = 80 excluded from 21 evaluable times
  const PowerTable again = estimate_probabilities(sc, cfg);
  CHECK(again.null.p_III == t.null.p_III);
  std::ostringstream os;
  write_power_tables_csv(os, {t});
  CHECK(os.str().rfind("probability,H0,u=15;mask=all", 0) == 0);
}

TEST_CASE("probability table does not depend on the thread count") {
  Scenario sc;
  sc.p = 4;
  sc.n = 2;
  sc.u = 0.5;
  sc.replications = 6;
  sc.seed = 31;
  const SimConfig cfg;
  auto table_with = [&](int threads) {
    ThreadLimit cap(threads);
    std::ostringstream os;
    write_power_tables_csv(os, {estimate_probabilities(sc, cfg)});
    return os.str();
  };
  CHECK(table_with(1) == table_with(4));
}
