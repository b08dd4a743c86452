#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include "matbf/errors.hpp"
#include "matbf/univariate.hpp"
#include "support.hpp"

using namespace matbf;
using doctest::Approx;

namespace {

// Rows of the stepwise-prior table: Y, sigma, three (lower, upper, g) and the
// printed likelihood values p_j.
struct TableRow {
  double alpha_printed, Y, sigma;
  double seg[3][3];
  double lik[3];
};

const TableRow kRows[3] = {
    {0.054, -4.422, 1.120, {{0.471, 0.565, 0.440}, {1.487, 1.507, 50.000}, {2.863, 5.863, 0.001}},
     {0.180, 0.001, 0.001}},
    {0.076, -5.690, 1.054, {{-1.112, 1.689, 0.002}, {2.422, 2.588, 0.492}, {4.780, 4.800, 45.645}},
     {0.002, 0.153, 0.002}},
    {0.412, -8.723, 1.939, {{0.996, 1.409, 0.934}, {2.628, 4.209, 0.023}, {5.498, 5.549, 11.510}},
     {0.146, 0.019, 0.041}},
};

StepPrior table_prior(const TableRow& r) {
  StepPrior p;
  p.Y = r.Y;
  p.sigma = r.sigma;
  for (int j = 0; j < 3; ++j) p.segments.push_back({r.seg[j][0], r.seg[j][1], r.seg[j][2], r.lik[j]});
  return p.normalized();
}

}  // namespace

TEST_CASE("step prior validation") {
  StepPrior p;
  p.segments = {{0.0, 1.0, 0.5}, {2.0, 3.0, 0.5}};
  CHECK_NOTHROW(p.validate());
  CHECK(step_prior_bf(p, 1.0) == Approx(1.0).epsilon(1e-14));
  StepPrior overlap = p;
  overlap.segments[1].lower = 0.5;
  CHECK_THROWS_AS(overlap.validate(), DomainError);
  StepPrior heavy = p;
  heavy.segments[0].g = 0.9;
  CHECK_THROWS_AS(heavy.validate(), DomainError);
  CHECK(heavy.normalized().mass() == Approx(1.0));
  CHECK_THROWS_AS(step_prior_bf(p, 0.0), DomainError);
}

TEST_CASE("exact step BF equals quadrature of the segment likelihoods") {
  StepPrior p;
  p.Y = -1.3;
  p.sigma = 0.8;
  p.segments = {{-2.0, -1.0, 0.3}, {0.0, 1.5, 0.2}, {3.0, 4.0, 0.4}};
  REQUIRE(p.mass() == Approx(1.0));
  boost::math::normal_distribution<double> nd(p.Y, p.sigma);
  for (double a : {0.1, 0.5, 0.9}) {
    double num = 0.0, den = 0.0, norm = 0.0;
    for (const auto& s : p.segments) {
      const double I = test::integrate([&](double th) { return boost::math::pdf(nd, th); },
                                       s.lower, s.upper);
      num += s.g * I;
      den += std::pow(s.g, a) * I;
      norm += std::pow(s.g, a) * (s.upper - s.lower);
    }
    CHECK(step_prior_bf(p, a) == Approx(num * norm / den).epsilon(1e-12));
  }
}

TEST_CASE("stepwise-prior table roots (mean-value form)") {
  for (const auto& r : kRows) {
    const StepPrior prior = table_prior(r);
    auto bf = [&](double a) { return step_prior_bf(prior, a, StepForm::mean_value); };
    const auto root = find_unit_crossing(bf, 1e-4, 1.0 - 1e-9);
    REQUIRE(root.has_value());
    CHECK(std::abs(*root - r.alpha_printed) <= 0.02);
    // H > 1 below the root and H < 1 above it
    for (int i = 1; i < 1000; ++i) {
      const double a = i / 1000.0;
      if (a < *root - 1e-6) CHECK(bf(a) > 1.0);
      if (a > *root + 1e-6) CHECK(bf(a) < 1.0);
    }
  }
}

TEST_CASE("find_unit_crossing") {
  CHECK_FALSE(find_unit_crossing([](double) { return 1.0; }, 0.01, 0.99).has_value());
  // moderate deviation: H > 1 for small alpha, dips below 1 near the stationary point
  const double Y = 2.5, ms = 0.0, sigma = 1.0, phi = 1.0;
  const long t = 10;
  auto bf = [&](double a) { return univ_bf_closed_form(Y, ms, sigma, phi, t, a).H; };
  const auto root = find_unit_crossing(bf, 1e-4, 1.0 - 1e-9);
  REQUIRE(root.has_value());
  double grid_root = 0.0;
  for (int i = 1; i < 1000000; ++i) {
    const double a = 1e-4 + (1.0 - 1e-4) * i / 1e6;
    if (bf(a) < 1.0) {
      grid_root = a;
      break;
    }
  }
  CHECK(*root == Approx(grid_root).epsilon(2e-6));
  // residual bounded by the slope times the bisection tolerance on alpha
  CHECK(std::abs(bf(*root) - 1.0) <= 2e-10 * std::abs(univ_bf_derivative(Y, ms, sigma, phi, t, *root)) + 1e-14);
}

TEST_CASE("univariate closed form basics") {
  const UnivBF at_mode = univ_bf_closed_form(0.7, 0.7, 1.1, 2.0, 4, 0.3);
  CHECK(at_mode.H == Approx(at_mode.kappa));
  const UnivBF one = univ_bf_closed_form(3.0, 0.0, 1.0, 1.0, 3, 1.0);
  CHECK(one.H == Approx(1.0));
  CHECK(one.kappa == Approx(1.0));
  CHECK_FALSE(univ_stationary_alpha(0.1, 0.0, 1.0, 1.0, 3).has_value());
}

TEST_CASE("integrated kappa bound") {
  for (double phi : {0.5, 1.0, 10.0})
    for (long t : {2L, 5L, 10L, 50L, 100L}) {
      const double K = phi + t - 1;
      const double I = test::integrate_singular(
          [&](double a) { return std::sqrt((a * K + 1.0) / (a * (K + 1.0))); }, 0.0, 1.0);
      CHECK(univ_ibf_bound(phi, t) >= I - 1e-10);
    }
  CHECK(univ_ibf_bound(1.0, 1000000) - 1.0 < 1e-5);
  CounterRng rng(61);
  for (int i = 0; i < 100; ++i) {
    const double Y = 3.0 * rng.normal(), ms = rng.normal();
    const double I = test::integrate_singular(
        [&](double a) { return univ_bf_closed_form(Y, ms, 1.0, 1.0, 6, a).H; }, 0.0, 1.0);
    CHECK(univ_ibf_bound(1.0, 6) >= I);
  }
}
