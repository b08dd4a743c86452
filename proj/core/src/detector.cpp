#include "matbf/detector.hpp"

#include <cmath>

#include "matbf/conjugate.hpp"
#include "matbf/curve.hpp"
#include "matbf/errors.hpp"
#include "matbf/parallel.hpp"

namespace matbf {

namespace {

constexpr double kMbfFloor = 1e-6;

struct WindowFit {
  std::size_t index = 0;  // scored observation
  KnownVModel kv_model;
  PosteriorKnownV kv_post;
  NIWModel niw_model;
  PosteriorNIW niw_post;
};

Mat column_cov(const DetectorConfig& c, int n) {
  return c.V ? *c.V : Mat::Identity(n, n);
}

std::vector<WindowFit> fit_windows(const MatrixSeries& series, const DetectorConfig& c,
                                   std::size_t last) {
  const int n = series.n();
  const std::size_t w = c.window;
  const double phi = static_cast<double>(w);
  const Mat V = column_cov(c, n);
  std::vector<WindowFit> fits;
  std::optional<Mat> prev_mean;
  std::optional<Mat> frozen;
  for (std::size_t s = w; s <= last; ++s) {
    const MatrixSeries win = series.slice(s - w, s);
    WindowFit f;
    f.index = s;
    Mat sigma_l;
    if (c.sigma_estimator == SigmaEstimator::user_supplied) {
      sigma_l = *c.sigma_l;
    } else if (c.freeze_sigma && frozen) {
      sigma_l = *frozen;
    } else {
      // Unknown V: Sigma_L is estimated with identity column weighting.
      sigma_l = estimate_sigma_l(win, c.regime == Regime::known_v ? V : Mat::Identity(n, n));
      frozen = sigma_l;
    }
    const Mat M = prev_mean ? *prev_mean : suff_stats(win).mean();
    if (c.regime == Regime::known_v) {
      f.kv_model = {M, sigma_l, V, phi};
      f.kv_post = update_known_v(f.kv_model, win);
      prev_mean = f.kv_post.M_star;
    } else {
      f.niw_model.M = M;
      f.niw_model.Sigma_L = sigma_l;
      f.niw_model.phi = phi;
      f.niw_model.rho = c.niw_rho;
      f.niw_model.Psi = c.niw_psi ? *c.niw_psi : Mat::Identity(n, n);
      f.niw_model.m = c.niw_m ? *c.niw_m : 2.0 * n + 3.0;
      f.niw_post = update_niw(f.niw_model, win);
      prev_mean = f.niw_post.M_star;
    }
    fits.push_back(std::move(f));
  }
  return fits;
}

std::vector<TruncatedBeta> resolve_weights(const DetectorConfig& c, int p, int n,
                                           double alpha_low) {
  std::vector<TruncatedBeta> ws;
  ws.push_back(c.weight_primary ? *c.weight_primary : default_weight(p, n, 0.7, alpha_low, 1.0));
  ws.push_back(c.weight_secondary ? *c.weight_secondary
                                  : default_weight(p, n, 0.3, alpha_low, 1.0));
  return ws;
}

// Scores one observation against its window fit.
template <class Curve, class EvalFn>
DecisionRow score(long t, const Curve& curve, EvalFn eval_bf,
                  const CalibrationResult& cal, const DetectorConfig& c,
                  const std::vector<TruncatedBeta>& weights, const IntegrandInfo& info) {
  DecisionRow row;
  row.t = t;
  row.alpha_star = cal.alpha_star;
  const BFEvaluation e = eval_bf(cal.alpha_star);
  row.log_H = e.log_H;
  row.H = e.H;
  row.log_kappa = e.log_kappa;
  row.kappa = e.kappa;
  row.h_lower = cal.h_lower;
  row.h_upper = cal.h_upper;
  row.decision = decide_log(row.log_H, cal);
  row.jeffreys = jeffreys_label_log(row.log_H);
  for (double a : c.alpha_fixed) row.log_H_fixed.push_back(eval_bf(a).log_H);
  for (double a : c.curve_grid) {
    BFEvaluation g = eval_bf(a);
    g.t = t;
    row.curve.push_back(g);
  }
  if (c.robust) {
    const auto log_h = [&](double a) { return curve.log_H(a); };
    const auto log_k = [&](double a) { return curve.log_kappa(a); };
    try {
      row.mbf = minimum_bf(log_h, std::max(kMbfFloor, info.alpha_low + kMbfFloor), 1.0);
      for (const auto& w : weights) {
        const IntegratedBF ib = integrated_bf(log_h, w, info);
        row.ibf.push_back(ib.value);
        row.ibf_error.push_back(ib.error);
        row.nibf.push_back(normalized_ibf(log_h, log_k, w, info));
      }
    } catch (const std::exception& ex) {
      row.robust_error = ex.what();
    }
  }
  return row;
}

}  // namespace

void DetectorConfig::validate() const {
  if (window < 2) throw InputError("detector: window must be >= 2");
  if (!(tau > 0.0 && tau < 1.0)) throw InputError("detector: tau must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("detector: beta must lie in (0, 1)");
  for (double a : alpha_fixed)
    if (!(a > 0.0 && a <= 1.0)) throw InputError("detector: fixed alpha values must lie in (0, 1]");
  for (double a : curve_grid)
    if (!(a > 0.0 && a <= 1.0)) throw InputError("detector: curve grid must lie in (0, 1]");
  if (sigma_estimator == SigmaEstimator::user_supplied && !sigma_l)
    throw InputError("detector: user-supplied Sigma_L missing");
  if (regime == Regime::unknown_v && V)
    throw InputError("detector: a fixed V is only meaningful in the known-V regime");
}

Mat estimate_sigma_l(const MatrixSeries& window, const Mat& V) {
  const std::size_t w = window.size();
  if (w < 2) throw InputError("estimate_sigma_l: window needs at least 2 observations");
  const int p = window.p(), n = window.n();
  require_shape(V, n, n, "V");
  const SpdFactor Vf(V, "V");
  const Mat mean = suff_stats(window).mean();
  Mat S = Mat::Zero(p, p);
  for (const auto& o : window.obs()) {
    const Mat R = o.Y - mean;
    S.noalias() += R * Vf.solve(R.transpose());
  }
  S /= static_cast<double>(w - 1) * n;
  S = symmetrize(S);
  const double tr = S.trace();
  if (!(tr > 0.0) || !std::isfinite(tr))
    throw CovarianceError("estimate_sigma_l: window residuals are degenerate (zero trace)");
  S.diagonal().array() += 1e-8 * tr / p;
  if (!validate_spd(S))
    throw CovarianceError("estimate_sigma_l: estimate not SPD after ridge shrinkage");
  return S;
}

DecisionReport run_sequential(const MatrixSeries& series, const DetectorConfig& c) {
  c.validate();
  if (series.size() <= c.window)
    throw InputError("detector: series length " + std::to_string(series.size()) +
                     " must exceed the window " + std::to_string(c.window));
  const int p = series.p(), n = series.n();
  if (c.sigma_l) require_shape(*c.sigma_l, p, p, "Sigma_L");
  if (c.V) require_shape(*c.V, n, n, "V");

  const std::vector<WindowFit> fits = fit_windows(series, c, series.size() - 1);

  DecisionReport rep;
  rep.p = p;
  rep.n = n;
  rep.window = c.window;
  rep.regime = c.regime;
  rep.alpha_fixed = c.alpha_fixed;
  rep.curve_grid = c.curve_grid;

  double alpha_low = 0.0;
  if (c.regime == Regime::unknown_v) alpha_low = alpha_low_niw(fits.front().niw_post, p, n);
  if (c.calibration_override) {
    rep.calibration = *c.calibration_override;
  } else if (c.regime == Regime::known_v) {
    // Thresholds depend only on (p, n, phi, T) for the production posterior.
    rep.calibration = calibrate_production(p, n, static_cast<double>(c.window),
                                           static_cast<long>(c.window), c.tau, c.beta,
                                           c.calibration);
  } else {
    // The null law of H depends only on (p, n, k_*, m_*), shared by all windows.
    const auto& f0 = fits.front();
    rep.calibration = calibrate_unknown_v_mc(f0.niw_post, f0.niw_model, c.tau, c.beta,
                                             c.calibration, c.mc_draws, c.seed);
  }
  rep.weights = resolve_weights(c, p, n, alpha_low);
  const IntegrandInfo info{c.regime, p, n, alpha_low};

  rep.rows.resize(fits.size());
  parallel_for(fits.size(), [&](std::size_t i) {
    const WindowFit& f = fits[i];
    const MatrixObs& o = series[f.index];
    if (c.regime == Regime::known_v) {
      const KnownVCurve curve(o.Y, f.kv_post, f.kv_model);
      rep.rows[i] = score(
          o.t, curve,
          [&](double a) { return bf_known_v(o.Y, f.kv_post, f.kv_model, a, o.t); },
          rep.calibration, c, rep.weights, info);
    } else {
      const UnknownVCurve curve(o.Y, f.niw_post, f.niw_model);
      rep.rows[i] = score(
          o.t, curve,
          [&](double a) { return bf_unknown_v(o.Y, f.niw_post, f.niw_model, a, o.t); },
          rep.calibration, c, rep.weights, info);
    }
  });

  if (c.classical) {
    rep.classical = elementwise_scan(series, c.classical_opts);
    for (std::size_t i = 0; i < fits.size(); ++i)
      for (std::size_t l = 0; l < rep.classical->levels.size(); ++l)
        rep.rows[i].classical_counts.push_back(rep.classical->count_per_time[l][fits[i].index]);
  }
  return rep;
}

std::vector<BFEvaluation> bf_alpha_curve(const MatrixSeries& series, const DetectorConfig& c,
                                         long t, const std::vector<double>& grid) {
  c.validate();
  std::size_t idx = series.size();
  for (std::size_t s = 0; s < series.size(); ++s)
    if (series[s].t == t) idx = s;
  if (idx == series.size()) throw DomainError("bf_alpha_curve: no observation at t = " + std::to_string(t));
  if (idx < c.window)
    throw DomainError("bf_alpha_curve: t = " + std::to_string(t) + " precedes the first full window");
  const WindowFit f = fit_windows(series, c, idx).back();
  const Mat& Y = series[idx].Y;
  std::vector<BFEvaluation> out;
  for (double a : grid)
    out.push_back(c.regime == Regime::known_v ? bf_known_v(Y, f.kv_post, f.kv_model, a, t)
                                              : bf_unknown_v(Y, f.niw_post, f.niw_model, a, t));
  return out;
}

std::string to_string(Regime r) { return r == Regime::known_v ? "known_v" : "unknown_v"; }

}  // namespace matbf
