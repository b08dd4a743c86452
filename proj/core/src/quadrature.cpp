#include "matbf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <gsl/gsl_integration.h>

#include "matbf/errors.hpp"

namespace matbf {

GaussLegendre::GaussLegendre(int order) {
  if (order < 1) throw DomainError("GaussLegendre: order must be positive");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)),
            &gsl_integration_glfixed_table_free);
  if (!table) throw NumericalError("GaussLegendre: node table allocation failed");
  nodes_.resize(static_cast<std::size_t>(order));
  weights_.resize(static_cast<std::size_t>(order));
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    gsl_integration_glfixed_point(-1.0, 1.0, i, &nodes_[i], &weights_[i], table.get());
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a,
                                double b) const {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(c + h * nodes_[i]);
  return h * s;
}

const GaussLegendre& gauss_legendre_128() {
  static const GaussLegendre rule(128);
  return rule;
}

QuadResult integrate_panels(const std::function<double(double)>& f,
                            std::vector<double> breakpoints, const GaussLegendre& rule) {
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  QuadResult r;
  const std::size_t per = static_cast<std::size_t>(rule.order());
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k], b = breakpoints[k + 1];
    const double m = 0.5 * (a + b);
    const double whole = rule.integrate(f, a, b);
    const double halves = rule.integrate(f, a, m) + rule.integrate(f, m, b);
    r.value += halves;
    r.error += std::abs(whole - halves);
    r.evaluations += 3 * per;
  }
  if (!std::isfinite(r.value)) throw NumericalError("integrate_panels: non-finite integral");
  return r;
}

}  // namespace matbf
