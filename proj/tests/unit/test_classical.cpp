#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "matbf/classical.hpp"
#include "matbf/errors.hpp"
#include "support.hpp"

using namespace matbf;
using doctest::Approx;

namespace {

std::vector<double> normals(CounterRng& rng, std::size_t N) {
  std::vector<double> x(N);
  for (auto& v : x) v = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("Grubbs hand-computed example") {
  const GrubbsResult r = grubbs_test({1, 2, 3, 100}, 0.05);
  // mean 26.5, s = sqrt(7205 / 3)
  CHECK(r.G == Approx(73.5 / std::sqrt(7205.0 / 3.0)).epsilon(1e-14));
  CHECK(r.G == Approx(1.5).epsilon(1e-3));
  CHECK(r.critical == Approx(1.481).epsilon(1e-3));
  REQUIRE(r.flagged.has_value());
  CHECK(*r.flagged == 3);
  CHECK_THROWS_AS(grubbs_test({2, 2, 2, 2}, 0.05), DomainError);
  CHECK_THROWS_AS(grubbs_test({1, 2}, 0.05), InputError);
  CHECK_FALSE(grubbs_test({-1, -0.5, 0, 0.5, 1}, 0.05).flagged.has_value());
}

TEST_CASE("Grubbs critical value is the simulated null quantile") {
  CounterRng rng(91);
  const std::size_t N = 10;
  const double crit = grubbs_test(normals(rng, N), 0.05).critical;
  const int reps = 100000;
  int exceed = 0;
  for (int i = 0; i < reps; ++i) exceed += grubbs_test(normals(rng, N), 0.05).G > crit;
  // the Bonferroni-form critical value is slightly conservative
  const double rate = double(exceed) / reps;
  CHECK(rate <= 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / reps));
  CHECK(rate >= 0.045);
}

TEST_CASE("Grubbs flags are monotone in the level") {
  CounterRng rng(92);
  for (int i = 0; i < 1000; ++i) {
    auto x = normals(rng, 12);
    x[rng.below(12)] += 3.0 * rng.normal();
    const bool strict = grubbs_test(x, 0.01).flagged.has_value();
    const bool loose = grubbs_test(x, 0.05).flagged.has_value();
    CHECK((!strict || loose));
  }
}

TEST_CASE("GESD recovers two planted outliers") {
  CounterRng rng(93);
  int both = 0, extra = 0;
  const int reps = 1000;
  for (int i = 0; i < reps; ++i) {
    auto x = normals(rng, 50);
    const std::size_t a = rng.below(50);
    std::size_t b = rng.below(49);
    if (b >= a) ++b;
    x[a] += 10.0;
    x[b] -= 10.0;
    auto got = gesd_test(x, 5, 0.05);
    const bool has_a = std::find(got.begin(), got.end(), a) != got.end();
    const bool has_b = std::find(got.begin(), got.end(), b) != got.end();
    both += has_a && has_b;
    extra += got.size() > 2;
  }
  CHECK(both >= 990);
  // further flags are clean points crossing the 5% critical values
  CHECK(extra <= 0.05 * reps + 3.0 * std::sqrt(0.05 * 0.95 * reps));
}

TEST_CASE("GESD size on clean data and trivial cap") {
  CounterRng rng(94);
  const int reps = 4000;
  int clean = 0;
  for (int i = 0; i < reps; ++i) clean += gesd_test(normals(rng, 40), 4, 0.05).empty();
  CHECK(double(clean) / reps >= 0.95 - 3.0 * std::sqrt(0.05 * 0.95 / reps));
  CHECK(gesd_test({1, 2, 3, 100}, 0, 0.05).empty());
  CHECK_THROWS_AS(gesd_test({1, 2, 3}, 2, 0.05), InputError);
  CHECK(default_gesd_cap(100) == 10);
  CHECK(default_gesd_cap(11) == 2);
}

TEST_CASE("GESD with one removal agrees with Grubbs") {
  CounterRng rng(95);
  for (int i = 0; i < 1000; ++i) {
    auto x = normals(rng, 15);
    x[rng.below(15)] += 2.5 * rng.normal();
    CHECK(gesd_test(x, 1, 0.05).size() == (grubbs_test(x, 0.05).flagged ? 1u : 0u));
  }
}

TEST_CASE("element-wise scan: row outlier and count bookkeeping") {
  CounterRng rng(96);
  const int p = 4, n = 3;
  MatrixSeries s(p, n);
  for (long t = 1; t <= 40; ++t) {
    Mat Y = rng.normal_matrix(p, n);
    if (t == 25) Y.row(2).array() += 12.0;
    s.push_back(t, Y);
  }
  ClassicalOptions o;
  o.test = ClassicalTest::grubbs;
  const ClassicalReport r = elementwise_scan(s, o);
  const std::size_t t25 = 24;
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    CHECK(r.rows_per_time[l][t25] == 1);
    CHECK(r.cols_per_time[l][t25] == n);
    for (std::size_t t = 0; t < r.times.size(); ++t) {
      long sum = 0;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < n; ++j) sum += r.flag(l, i, j, t);
      CHECK(sum == r.count_per_time[l][t]);
    }
  }
  ClassicalOptions bad;
  bad.levels = {};
  CHECK_THROWS_AS(elementwise_scan(s, bad), InputError);
}

TEST_CASE("Bonferroni never increases counts") {
  CounterRng rng(97);
  for (auto test : {ClassicalTest::grubbs, ClassicalTest::gesd}) {
    MatrixSeries s(5, 4);
    for (long t = 1; t <= 30; ++t) {
      Mat Y = rng.normal_matrix(5, 4);
      if (t % 7 == 0) Y(t % 5, t % 4) += 4.0 + 3.0 * rng.uniform();
      s.push_back(t, Y);
    }
    ClassicalOptions plain, bonf;
    plain.test = bonf.test = test;
    bonf.bonferroni = true;
    const ClassicalReport a = elementwise_scan(s, plain), b = elementwise_scan(s, bonf);
    CHECK(b.levels[0] == Approx(plain.levels[0] / 20.0));
    for (std::size_t l = 0; l < a.levels.size(); ++l)
      for (std::size_t t = 0; t < a.times.size(); ++t)
        CHECK(b.count_per_time[l][t] <= a.count_per_time[l][t]);
  }
}

TEST_CASE("clean series: flagged entries follow the binomial expectation") {
  CounterRng rng(98);
  const int p = 20, n = 20;
  MatrixSeries s(p, n);
  for (long t = 1; t <= 30; ++t) s.push_back(t, rng.normal_matrix(p, n));
  ClassicalOptions o;
  o.test = ClassicalTest::grubbs;
  o.levels = {0.05};
  const ClassicalReport r = elementwise_scan(s, o);
  const long total = std::accumulate(r.count_per_time[0].begin(), r.count_per_time[0].end(), 0L);
  const double expect = p * n * 0.05, sd = std::sqrt(p * n * 0.05 * 0.95);
  CHECK(std::abs(total - expect) < 3.0 * sd);
}

TEST_CASE("windowed scan flags only the newest point") {
  CounterRng rng(99);
  MatrixSeries s(1, 1);
  for (long t = 1; t <= 30; ++t) s.push_back(t, Mat::Constant(1, 1, rng.normal() + (t == 12 ? 15.0 : 0.0)));
  ClassicalOptions o;
  o.window = 10;
  o.levels = {0.05};
  const ClassicalReport r = elementwise_scan(s, o);
  CHECK(r.flag(0, 0, 0, 11));
  long total = 0;
  for (long c : r.count_per_time[0]) total += c;
  CHECK(total <= 3);
}
