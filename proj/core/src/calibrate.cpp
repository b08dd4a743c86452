#include "matbf/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "matbf/bayesfactor.hpp"
#include "matbf/curve.hpp"
#include "matbf/errors.hpp"
#include "matbf/matdist.hpp"
#include "matbf/parallel.hpp"
#include "matbf/rng.hpp"

namespace matbf {

namespace {

struct AlphaPoint {
  double alpha = 0.0;
  double h_lower = 0.0;
  double power = 0.0;
  double size_residual = 0.0;
  bool eligible = false;  // 0 < h_lower < 1
};

using Evaluator = std::function<AlphaPoint(double)>;

void check_inputs(double tau, double beta, const CalibrationOptions& opts) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("calibrate: tau must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("calibrate: beta must lie in (0, 1)");
  if (!(opts.alpha_lo > 0.0 && opts.alpha_lo < opts.alpha_hi && opts.alpha_hi < 1.0))
    throw InputError("calibrate: alpha range must satisfy 0 < lo < hi < 1");
  if (opts.prescan < 2) throw InputError("calibrate: prescan needs at least 2 points");
  if (!(opts.alpha_tol > 0.0)) throw InputError("calibrate: alpha_tol must be positive");
}

double power_of(double F1_upper, PowerConvention c) {
  return c == PowerConvention::upper_survival ? 1.0 - F1_upper : F1_upper;
}

CalibrationResult finish(const AlphaPoint& pt, double tau, double beta, bool feasible,
                         PowerConvention c) {
  CalibrationResult r;
  r.alpha_star = pt.alpha;
  r.h_lower = pt.h_lower;
  r.h_upper = 2.0 - pt.h_lower;
  r.tau = tau;
  r.beta = beta;
  r.achieved_power = pt.power;
  r.feasible = feasible;
  r.convention = c;
  r.size_residual = pt.size_residual;
  return r;
}

// Grid pre-scan, then bisection inside the highest-alpha bracket of the beta
// crossing. Power monotonicity is only assumed inside that bracket.
CalibrationResult search(const Evaluator& eval, double tau, double beta,
                         const CalibrationOptions& opts) {
  const std::size_t N = static_cast<std::size_t>(opts.prescan);
  std::vector<AlphaPoint> grid(N);
  parallel_for(N, [&](std::size_t i) {
    const double a =
        opts.alpha_lo + (opts.alpha_hi - opts.alpha_lo) * static_cast<double>(i) / (N - 1.0);
    grid[i] = eval(a);
  });

  std::ptrdiff_t bracket = -1;
  for (std::size_t i = 0; i + 1 < N; ++i) {
    if (!grid[i].eligible || !grid[i + 1].eligible) continue;
    const double g0 = grid[i].power - beta, g1 = grid[i + 1].power - beta;
    if ((g0 >= 0.0) != (g1 >= 0.0)) bracket = static_cast<std::ptrdiff_t>(i);
  }

  if (bracket < 0) {
    // No crossing: either every eligible point meets beta (take the largest
    // such alpha) or none does (flag and return the power maximizer).
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < N; ++i)
      if (grid[i].eligible && grid[i].power >= beta) best = static_cast<std::ptrdiff_t>(i);
    if (best >= 0) return finish(grid[best], tau, beta, true, opts.convention);
    std::size_t arg = 0;
    bool any = false;
    for (std::size_t i = 0; i < N; ++i) {
      if (!grid[i].eligible) continue;
      if (!any || grid[i].power > grid[arg].power) arg = i;
      any = true;
    }
    return finish(grid[arg], tau, beta, false, opts.convention);
  }

  AlphaPoint lo = grid[bracket], hi = grid[bracket + 1];
  const bool lo_ok = lo.power >= beta;
  while (hi.alpha - lo.alpha > opts.alpha_tol) {
    const AlphaPoint mid = eval(0.5 * (lo.alpha + hi.alpha));
    if ((mid.power >= beta) == lo_ok)
      lo = mid;
    else
      hi = mid;
  }
  return finish(lo_ok ? lo : hi, tau, beta, true, opts.convention);
}

// Upper tail level of the empirical law: P(X <= q) >= level with the smallest such q.
double empirical_quantile(const std::vector<double>& sorted, double level) {
  const std::size_t N = sorted.size();
  std::size_t k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(N)));
  k = std::clamp<std::size_t>(k, 1, N);
  return sorted[k - 1];
}

double empirical_cdf(const std::vector<double>& sorted, double x) {
  return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
         static_cast<double>(sorted.size());
}

}  // namespace

double lower_threshold(const BFDistribution& null_dist, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("lower_threshold: tau must lie in (0, 1)");
  // F_0(h) = P(Q >= x(h)); P(Q >= x) decreases from 1 at x = 0.
  double hi = 1.0;
  int guard = 0;
  while (null_dist.q_sf(hi) > tau) {
    hi *= 2.0;
    if (++guard > 200) throw NumericalError("lower_threshold: cannot bracket the tau quantile");
  }
  const auto f = [&](double x) { return null_dist.q_sf(x) - tau; };
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
  std::uintmax_t iters = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, hi, 1.0 - tau, f(hi), tol, iters);
  const double x = 0.5 * (a + b);
  return std::exp(null_dist.log_kappa() - 0.5 * x);
}

CalibrationResult calibrate(const PosteriorKnownV& post, const KnownVModel& model, double tau,
                            double beta, const CalibrationOptions& opts) {
  check_inputs(tau, beta, opts);
  model.validate();
  const Evaluator eval = [&](double alpha) {
    AlphaPoint pt;
    pt.alpha = alpha;
    const auto null = BFDistribution::for_hypothesis(post, model, alpha, Hypothesis::null);
    const auto alt = BFDistribution::for_hypothesis(post, model, alpha, Hypothesis::alternative);
    pt.h_lower = lower_threshold(null, tau);
    pt.size_residual = null.cdf(pt.h_lower) - tau;
    pt.eligible = pt.h_lower > 0.0 && pt.h_lower < 1.0;
    const double h_up = 2.0 - pt.h_lower;
    pt.power = power_of(h_up > 0.0 ? alt.cdf(h_up) : 0.0, opts.convention);
    return pt;
  };
  return search(eval, tau, beta, opts);
}

CalibrationResult calibrate_production(int p, int n, double phi, long T, double tau, double beta,
                                       const CalibrationOptions& opts) {
  if (p < 1 || n < 1) throw InputError("calibrate: p and n must be positive");
  if (!(phi > 0.0)) throw InputError("calibrate: phi must be positive");
  if (T < 0) throw InputError("calibrate: T must be non-negative");
  KnownVModel model;
  model.M = Mat::Zero(p, n);
  model.Sigma_L = Mat::Identity(p, p);
  model.V = Mat::Identity(n, n);
  model.phi = phi;
  PosteriorKnownV post;
  post.M_star = Mat::Zero(p, n);
  post.Sigma_star = Mat::Identity(p, p) / (phi + static_cast<double>(T));
  post.T = T;
  return calibrate(post, model, tau, beta, opts);
}

CalibrationResult calibrate_unknown_v_mc(const PosteriorNIW& post, const NIWModel& model,
                                         double tau, double beta, CalibrationOptions opts,
                                         std::size_t draws, std::uint64_t seed) {
  model.validate();
  const int p = model.p(), n = model.n();
  opts.alpha_lo = std::max(opts.alpha_lo, alpha_low_niw(post, p, n) + 1e-6);
  check_inputs(tau, beta, opts);
  if (draws < 100) throw InputError("calibrate: at least 100 Monte Carlo draws required");

  const Mat Lrow = SpdFactor(model.Sigma_L, "Sigma_L").matrixL();
  const std::uint64_t null_seed = derive_seed(seed, 0), alt_seed = derive_seed(seed, 1);

  // Null predictive does not involve alpha: one set of draws, one curve each.
  std::vector<UnknownVCurve> curves;
  curves.reserve(draws);
  {
    std::vector<Mat> ys(draws);
    const double scale = std::sqrt((post.k_star + 1.0) / post.k_star);
    parallel_for(draws, [&](std::size_t r) {
      const Mat Cv = invwishart_sample_factor({post.Psi_star, post.m_star}, derive_seed(null_seed, r));
      CounterRng rng(null_seed, r + 1);
      const Mat Z = rng.normal_matrix(p, n);
      ys[r] = post.M_star + scale * Lrow * Z * Cv.transpose();
    });
    for (const Mat& Y : ys) curves.emplace_back(Y, post, model);
  }

  const Evaluator eval = [&](double alpha) {
    AlphaPoint pt;
    pt.alpha = alpha;
    std::vector<double> h0(draws), h1(draws);
    for (std::size_t r = 0; r < draws; ++r) h0[r] = curves[r].log_H(alpha);
    std::sort(h0.begin(), h0.end());
    const double log_hl = empirical_quantile(h0, tau);
    pt.h_lower = std::exp(log_hl);
    pt.size_residual = empirical_cdf(h0, log_hl) - tau;
    pt.eligible = pt.h_lower > 0.0 && pt.h_lower < 1.0;

    const PredictiveNIW pr = predictive_niw(post, model, alpha);
    const double scale = std::sqrt(pr.k_A_d / pr.k_A_star);
    for (std::size_t r = 0; r < draws; ++r) {
      const Mat Cv = invwishart_sample_factor({pr.Psi_A_star, pr.m_A_star}, derive_seed(alt_seed, r));
      CounterRng rng(alt_seed, r + 1);
      const Mat Z = rng.normal_matrix(p, n);
      const Mat Y = post.M_star + scale * Lrow * Z * Cv.transpose();
      // Near alpha_low the alternative has m_A - 2n -> 0 and Bartlett chi-square
      // draws underflow, putting Y beyond double range; bf_unknown_v returns the
      // H -> 0 limit there.
      h1[r] = bf_unknown_v(Y, post, model, alpha).log_H;
      if (std::isnan(h1[r])) throw NumericalError("calibrate: NaN Bayes factor in alternative draw");
    }
    std::sort(h1.begin(), h1.end());
    const double h_up = 2.0 - pt.h_lower;
    const double F1 = h_up > 0.0 ? empirical_cdf(h1, std::log(h_up)) : 0.0;
    pt.power = power_of(F1, opts.convention);
    return pt;
  };
  return search(eval, tau, beta, opts);
}

Decision decide(double H, const CalibrationResult& cal) {
  if (!(H > 0.0)) throw DomainError("decide: H must be positive");
  return decide_log(std::log(H), cal);
}

Decision decide_log(double log_H, const CalibrationResult& cal) {
  if (std::isnan(log_H)) throw DomainError("decide: log H is NaN");
  if (log_H < std::log(cal.h_lower)) return Decision::reject_null;
  if (log_H > std::log(cal.h_upper)) return Decision::accept_null;
  return Decision::inconclusive;
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::reject_null: return "reject_null";
    case Decision::accept_null: return "accept_null";
    case Decision::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(PowerConvention c) {
  return c == PowerConvention::upper_survival ? "upper_survival" : "upper_cdf";
}

std::string jeffreys_label(double H) {
  if (!(H > 0.0)) throw DomainError("jeffreys_label: H must be positive");
  return jeffreys_label_log(std::log(H));
}

std::string jeffreys_label_log(double log_H) {
  if (std::isnan(log_H)) throw DomainError("jeffreys_label: log H is NaN");
  const double b = -log_H / std::log(10.0);  // log10 of 1/H
  if (b <= 0.0) return "supports_null";
  if (b <= 0.5) return "barely_worth_mentioning";
  if (b <= 1.0) return "substantial";
  if (b <= 1.5) return "strong";
  if (b <= 2.0) return "very_strong";
  return "decisive";
}

}  // namespace matbf
