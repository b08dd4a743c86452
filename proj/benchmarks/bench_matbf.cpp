#include <benchmark/benchmark.h>

#include "matbf/bayesfactor.hpp"
#include "matbf/bfdist.hpp"
#include "matbf/calibrate.hpp"
#include "matbf/classical.hpp"
#include "matbf/conjugate.hpp"
#include "matbf/robust.hpp"
#include "matbf/rng.hpp"

using namespace matbf;

namespace {

struct Fixture {
  KnownVModel model;
  PosteriorKnownV post;
  Mat Y;
};

Fixture make_fixture(int p, int n) {
  CounterRng rng(42);
  const Mat A = rng.normal_matrix(p, p), B = rng.normal_matrix(n, n);
  Fixture f;
  f.model = {Mat::Zero(p, n), A * A.transpose() / p + Mat::Identity(p, p),
             B * B.transpose() / n + Mat::Identity(n, n), 20.0};
  f.post = {rng.normal_matrix(p, n), f.model.Sigma_L / 40.0, 20};
  f.post.Sigma_star(0, 0) *= 1.5;  // break proportionality so the Ruben path is used
  f.Y = f.post.M_star + rng.normal_matrix(p, n);
  return f;
}

void BM_BayesFactorKnownV(benchmark::State& st) {
  const Fixture f = make_fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(bf_known_v(f.Y, f.post, f.model, 0.75));
}
BENCHMARK(BM_BayesFactorKnownV)->Args({1, 1})->Args({30, 10})->Args({50, 50});

void BM_ConjugateUpdate(benchmark::State& st) {
  const int p = 30, n = 10;
  CounterRng rng(1);
  MatrixSeries s(p, n);
  for (long t = 1; t <= 79; ++t) s.push_back(t, rng.normal_matrix(p, n));
  const Fixture f = make_fixture(p, n);
  for (auto _ : st) benchmark::DoNotOptimize(update_known_v(f.model, s));
}
BENCHMARK(BM_ConjugateUpdate);

void BM_BFDistributionCdf(benchmark::State& st) {
  const Fixture f = make_fixture(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const BFDistribution F = BFDistribution::for_hypothesis(f.post, f.model, 0.5, Hypothesis::alternative);
  const double h = 0.5 * std::exp(F.log_kappa());
  for (auto _ : st) benchmark::DoNotOptimize(F.cdf(h));
}
BENCHMARK(BM_BFDistributionCdf)->Args({3, 2})->Args({30, 10});

void BM_CalibrateProduction(benchmark::State& st) {
  CalibrationOptions opts;
  opts.convention = PowerConvention::upper_cdf;
  for (auto _ : st) benchmark::DoNotOptimize(calibrate_production(30, 10, 79.0, 79, 0.01, 0.8, opts));
  st.SetLabel("p=30 n=10");
}
BENCHMARK(BM_CalibrateProduction)->Unit(benchmark::kMillisecond);

void BM_IntegratedBF(benchmark::State& st) {
  const Fixture f = make_fixture(30, 10);
  const TruncatedBeta w = default_weight(30, 10, 0.75);
  const IntegrandInfo info{Regime::known_v, 30, 10, 0.0};
  auto log_bf = [&](double a) { return bf_known_v(f.Y, f.post, f.model, a).log_H; };
  for (auto _ : st) benchmark::DoNotOptimize(integrated_bf(log_bf, w, info));
}
BENCHMARK(BM_IntegratedBF)->Unit(benchmark::kMillisecond);

void BM_Gesd(benchmark::State& st) {
  CounterRng rng(3);
  std::vector<double> x(static_cast<std::size_t>(st.range(0)));
  for (double& v : x) v = rng.normal();
  for (auto _ : st) benchmark::DoNotOptimize(gesd_test(x, default_gesd_cap(x.size()), 0.05));
}
BENCHMARK(BM_Gesd)->Arg(100)->Arg(1000);

}  // namespace

// The packaged libbenchmark_main.a carries LTO bytecode from another gcc patch
// level, so the main comes from here and only the shared library is linked.
BENCHMARK_MAIN();
