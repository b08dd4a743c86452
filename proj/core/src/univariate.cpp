#include "matbf/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "matbf/errors.hpp"

namespace matbf {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;
constexpr double kInvSqrt2Pi = 0.39894228040143268;

// P(za < Z < zb) for standard normal Z, accurate in both tails.
double normal_mass(double za, double zb) {
  if (za >= 0.0)
    return 0.5 * (boost::math::erfc(za * kInvSqrt2) - boost::math::erfc(zb * kInvSqrt2));
  if (zb <= 0.0)
    return 0.5 * (boost::math::erfc(-zb * kInvSqrt2) - boost::math::erfc(-za * kInvSqrt2));
  return 1.0 - 0.5 * (boost::math::erfc(-za * kInvSqrt2) + boost::math::erfc(zb * kInvSqrt2));
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("alpha must lie in (0, 1], got " + std::to_string(alpha));
}

double capital_k(double phi, long t) {
  if (!(phi > 0.0) || t < 1) throw DomainError("require phi > 0 and t >= 1");
  return phi + static_cast<double>(t - 1);
}

}  // namespace

double StepPrior::mass() const {
  double s = 0.0;
  for (const auto& seg : segments) s += seg.g * (seg.upper - seg.lower);
  return s;
}

void StepPrior::validate(double tol) const {
  if (segments.empty()) throw DomainError("StepPrior: no segments");
  if (!(sigma > 0.0)) throw DomainError("StepPrior: sigma must be positive");
  std::vector<StepSegment> s = segments;
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.lower < b.lower; });
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (!(s[j].lower < s[j].upper)) throw DomainError("StepPrior: empty segment");
    if (!(s[j].g > 0.0)) throw DomainError("StepPrior: density must be positive");
    if (j > 0 && s[j].lower < s[j - 1].upper) throw DomainError("StepPrior: overlapping segments");
  }
  if (std::abs(mass() - 1.0) > tol)
    throw DomainError("StepPrior: total mass " + std::to_string(mass()) + " differs from 1");
}

StepPrior StepPrior::normalized() const {
  StepPrior out = *this;
  const double m = mass();
  if (!(m > 0.0)) throw DomainError("StepPrior: nonpositive mass");
  for (auto& seg : out.segments) seg.g /= m;
  return out;
}

double step_prior_bf(const StepPrior& prior, double alpha, StepForm form) {
  check_alpha(alpha);
  prior.validate();
  double null_m = 0.0, alt_m = 0.0, norm = 0.0;
  for (const auto& seg : prior.segments) {
    const double len = seg.upper - seg.lower;
    double P = 0.0;  // integral of N(Y; theta, sigma^2) over the segment
    if (form == StepForm::exact) {
      P = normal_mass((seg.lower - prior.Y) / prior.sigma, (seg.upper - prior.Y) / prior.sigma);
    } else {
      double lik = seg.likelihood;
      if (std::isnan(lik)) {
        const double z = (0.5 * (seg.lower + seg.upper) - prior.Y) / prior.sigma;
        lik = kInvSqrt2Pi / prior.sigma * std::exp(-0.5 * z * z);
      }
      P = lik * len;
    }
    const double ga = std::pow(seg.g, alpha);
    null_m += seg.g * P;
    alt_m += ga * P;
    norm += ga * len;
  }
  // H = null / (C alt), C = 1 / norm
  return null_m * norm / alt_m;
}

std::optional<double> find_unit_crossing(const std::function<double(double)>& bf, double lo,
                                         double hi, double tol) {
  if (!(lo < hi)) return std::nullopt;
  constexpr int kGrid = 1000;
  auto f = [&](double a) { return bf(a) - 1.0; };
  double a_prev = lo, f_prev = f(lo);
  for (int i = 1; i < kGrid; ++i) {
    const double a = lo + (hi - lo) * i / (kGrid - 1);
    const double fa = f(a);
    if ((f_prev < 0.0 && fa > 0.0) || (f_prev > 0.0 && fa < 0.0)) {
      double l = a_prev, r = a, fl = f_prev;
      while (r - l > tol) {
        const double mid = 0.5 * (l + r);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (fl < 0.0)) {
          l = mid;
          fl = fm;
        } else {
          r = mid;
        }
      }
      return 0.5 * (l + r);
    }
    a_prev = a;
    f_prev = fa;
  }
  return std::nullopt;
}

UnivBF univ_bf_closed_form(double Y, double m_star, double sigma, double phi, long t,
                           double alpha) {
  check_alpha(alpha);
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  const double K = capital_k(phi, t);
  UnivBF r;
  r.log_kappa = 0.5 * (std::log(alpha * K + 1.0) - std::log(alpha * (K + 1.0)));
  const double D = Y - m_star;
  if (alpha == 1.0) {
    r.A = -std::numeric_limits<double>::infinity();
    r.log_H = r.log_kappa;
  } else {
    const double s2 = sigma * sigma;
    r.A = 2.0 * s2 * (K + 1.0) * (alpha * K + 1.0) / ((alpha - 1.0) * K);
    r.log_H = r.log_kappa + D * D / r.A;
  }
  r.H = std::exp(r.log_H);
  r.kappa = std::exp(r.log_kappa);
  return r;
}

double univ_bf_derivative(double Y, double m_star, double sigma, double phi, long t,
                          double alpha) {
  const UnivBF r = univ_bf_closed_form(Y, m_star, sigma, phi, t, alpha);
  const double K = capital_k(phi, t);
  const double D = Y - m_star;
  const double g = alpha * K + 1.0;
  return 0.5 * r.H * (K * D * D / (sigma * sigma * g * g) - 1.0 / (alpha * g));
}

std::optional<double> univ_stationary_alpha(double Y, double m_star, double sigma, double phi,
                                            long t) {
  const double K = capital_k(phi, t);
  const double z = (Y - m_star) * (Y - m_star) / (sigma * sigma);
  if (!(z > 1.0)) return std::nullopt;
  const double a0 = 1.0 / (K * (z - 1.0));
  if (!(a0 < 1.0)) return std::nullopt;
  return a0;
}

std::pair<double, double> univ_acceptance_interval(double m_star, double sigma, double phi,
                                                   long t, double alpha, double h0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const UnivBF r = univ_bf_closed_form(m_star, m_star, sigma, phi, t, alpha);
  if (!(h0 > 0.0) || std::log(h0) > r.log_kappa + 1e-15)
    throw DomainError("h0 must lie in (0, kappa]");
  const double half = std::sqrt(std::max(0.0, (std::log(h0) - r.log_kappa) * r.A));
  return {m_star - half, m_star + half};
}

double univ_ibf_bound(double phi, long t) {
  const double K = capital_k(phi, t);
  const double a = std::sqrt(K + 1.0), b = std::sqrt(K);
  // log((a + b)/(a - b)) = 2 atanh(b / a)
  return 1.0 + 2.0 * std::atanh(b / a) / (2.0 * std::sqrt(K * (K + 1.0)));
}

}  // namespace matbf
