#include "matbf/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "matbf/errors.hpp"
#include "matbf/quadrature.hpp"

namespace matbf {

void TruncatedBeta::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("TruncatedBeta: shapes must be positive");
  if (!(lower >= 0.0 && lower < upper && upper <= 1.0))
    throw DomainError("TruncatedBeta: require 0 <= lower < upper <= 1");
}

double TruncatedBeta::log_normalizer() const {
  validate();
  const double lbeta = boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
  const double mass = (upper >= 1.0 ? 1.0 : boost::math::ibeta(a, b, upper)) -
                      (lower <= 0.0 ? 0.0 : boost::math::ibeta(a, b, lower));
  if (!(mass > 0.0)) throw DomainError("TruncatedBeta: no probability mass on (lower, upper)");
  return lbeta + std::log(mass);
}

double TruncatedBeta::log_pdf(double x) const {
  if (!(x > lower && x < upper)) return -std::numeric_limits<double>::infinity();
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_normalizer();
}

double TruncatedBeta::pdf(double x) const { return std::exp(log_pdf(x)); }

double TruncatedBeta::mean() const { return a / (a + b); }

double TruncatedBeta::sd() const {
  const double s = a + b;
  return std::sqrt(a * b / (s * s * (s + 1.0)));
}

TruncatedBeta default_weight(int p, int n, double mode, double lower, double upper) {
  if (!(mode > 0.0 && mode < 1.0)) throw DomainError("default_weight: mode must lie in (0, 1)");
  TruncatedBeta w;
  w.a = 0.5 * n * p + 1e-4;
  if (!(w.a > 1.0)) throw DomainError("default_weight: np/2 must exceed 1 for a modal beta");
  // (a - 1) / (a + b - 2) = mode.
  w.b = (w.a - 1.0) / mode - w.a + 2.0;
  w.lower = lower;
  w.upper = upper;
  w.validate();
  return w;
}

std::optional<std::string> integrability_guard(Regime regime, int p, int n,
                                               std::optional<double> m_d,
                                               const TruncatedBeta& weight) {
  if (regime == Regime::known_v) {
    const double need = 0.5 * n * p;
    if (weight.a > need) return std::nullopt;
    return "known-V integrated BF requires a > np/2 = " + std::to_string(need) + ", got a = " +
           std::to_string(weight.a);
  }
  std::string msg;
  if (!(weight.a > 1.0)) msg = "unknown-V integrated BF requires a > 1";
  if (!m_d) {
    if (!msg.empty()) msg += "; ";
    msg += "unknown-V guard needs m_d";
  } else {
    const double lo = (2.0 * n + p) / *m_d;
    if (weight.lower < lo) {
      if (!msg.empty()) msg += "; ";
      msg += "unknown-V integrated BF requires lower >= (2n+p)/m_d = " + std::to_string(lo) +
             ", got lower = " + std::to_string(weight.lower);
    }
  }
  if (msg.empty()) return std::nullopt;
  return msg;
}

MinimumBF minimum_bf(const std::function<double(double)>& log_bf, double lo, double hi) {
  if (!(lo > 0.0 && lo < hi)) throw DomainError("minimum_bf: require 0 < lo < hi");
  constexpr int kGrid = 256;
  std::vector<double> a(kGrid), v(kGrid);
  const double ratio = std::log(hi / lo);
  int best = 0;
  for (int i = 0; i < kGrid; ++i) {
    a[i] = (i == kGrid - 1) ? hi : lo * std::exp(ratio * i / (kGrid - 1));
    v[i] = log_bf(a[i]);
    if (v[i] < v[best]) best = i;
  }
  double l = a[std::max(best - 1, 0)], r = a[std::min(best + 1, kGrid - 1)];
  MinimumBF out{a[best], v[best], 0.0};
  // Golden-section search on the bracket.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = r - g * (r - l), x2 = l + g * (r - l);
  double f1 = log_bf(x1), f2 = log_bf(x2);
  for (int it = 0; it < 200 && (r - l) > 1e-12 * std::max(1.0, r); ++it) {
    if (f1 < f2) {
      r = x2;
      x2 = x1;
      f2 = f1;
      x1 = r - g * (r - l);
      f1 = log_bf(x1);
    } else {
      l = x1;
      x1 = x2;
      f1 = f2;
      x2 = l + g * (r - l);
      f2 = log_bf(x2);
    }
  }
  if (f1 < out.log_mbf) out = {x1, f1, 0.0};
  if (f2 < out.log_mbf) out = {x2, f2, 0.0};
  out.mbf = std::exp(out.log_mbf);
  return out;
}

namespace {

constexpr double kLogTiny = -690.0;  // exp(-690) ~ 1e-300

IntegratedBF integrate_weighted(const std::function<double(double)>& log_f,
                                const TruncatedBeta& weight, const IntegrandInfo& info) {
  double lower = weight.lower;
  if (info.regime == Regime::unknown_v) lower = std::max(lower, info.alpha_low + 1e-6);
  const double upper = weight.upper;
  if (!(lower < upper)) throw DomainError("integrated_bf: empty integration range");
  const double log_norm = weight.log_normalizer();
  auto log_integrand = [&](double x) {
    return log_f(x) + (weight.a - 1.0) * std::log(x) + (weight.b - 1.0) * std::log1p(-x) -
           log_norm;
  };

  // Geometric grading toward the lower endpoint plus panels across the bulk
  // of the weight.
  std::vector<double> br;
  const double width = upper - lower;
  for (int j = 0; j <= 30; ++j) br.push_back(lower + width * std::ldexp(1.0, -j));
  br.push_back(upper);
  const double mu = weight.mean(), sd = weight.sd();
  for (int k = -8; k <= 8; ++k) {
    const double x = mu + k * sd;
    if (x > br[30] && x < upper) br.push_back(x);
  }
  const double first_end = br[30];

  // First panel: alpha = lower + delta v^q. At lower = 0 (known V) the
  // integrand behaves like alpha^{s-1}, s = a - np/2.
  const bool singular = info.regime == Regime::known_v && lower == 0.0;
  const double s = singular ? weight.a - 0.5 * info.n * info.p : 0.5;
  const double q = std::max(2.0, 1.0 / s);
  const double delta = first_end - lower;
  const double log_dq = std::log(delta) + std::log(q);
  double log_g0 = 0.0;
  if (singular) log_g0 = log_integrand(std::exp(kLogTiny)) - (s - 1.0) * kLogTiny;
  auto first = [&](double v) {
    const double lv = std::log(v);
    const double la = std::log(delta) + q * lv;
    double lf;
    if (singular && la < kLogTiny) {
      lf = log_g0 + (s - 1.0) * la;
    } else {
      const double x = lower + delta * std::exp(q * lv);
      lf = log_integrand(x);
    }
    return std::exp(lf + log_dq + (q - 1.0) * lv);
  };
  const QuadResult r0 = integrate_panels(first, {0.0, 1.0});
  std::vector<double> rest;
  for (double x : br)
    if (x >= first_end) rest.push_back(x);
  const QuadResult r1 = integrate_panels([&](double x) { return std::exp(log_integrand(x)); }, rest);
  IntegratedBF out;
  out.value = r0.value + r1.value;
  out.error = r0.error + r1.error;
  out.evaluations = r0.evaluations + r1.evaluations;
  return out;
}

void enforce_guard(const TruncatedBeta& weight, const IntegrandInfo& info) {
  weight.validate();
  std::optional<double> m_d;
  if (info.regime == Regime::unknown_v) {
    if (!(info.alpha_low > 0.0)) throw DomainError("integrated_bf: unknown V needs alpha_low > 0");
    m_d = (2.0 * info.n + info.p) / info.alpha_low;
  }
  if (auto v = integrability_guard(info.regime, info.p, info.n, m_d, weight))
    throw DomainError("integrability guard: " + *v);
}

}  // namespace

IntegratedBF integrated_bf(const std::function<double(double)>& log_bf,
                           const TruncatedBeta& weight, const IntegrandInfo& info) {
  enforce_guard(weight, info);
  IntegratedBF r = integrate_weighted(log_bf, weight, info);
  r.value -= 1.0;
  return r;
}

double normalized_ibf(const std::function<double(double)>& log_bf,
                      const std::function<double(double)>& log_kappa,
                      const TruncatedBeta& weight, const IntegrandInfo& info) {
  const double num = integrated_bf(log_bf, weight, info).value;
  const double den = integrated_bf(log_kappa, weight, info).value;
  if (!(den > 1e-12))
    throw NumericalError("normalized_ibf: degenerate normalizer (integral of kappa minus 1 = " +
                         std::to_string(den) + ")");
  return num / den;
}

}  // namespace matbf
