#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace matbf {

/// Fixed-order Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int order = 128);

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  double integrate(const std::function<double(double)>& f, double a, double b) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared 128-node rule.
const GaussLegendre& gauss_legendre_128();

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // sum over panels of |whole - two halves|
  std::size_t evaluations = 0;
};

/// Sum of per-panel rules over consecutive breakpoints (sorted, deduplicated
/// internally). Error estimate from panel halving.
QuadResult integrate_panels(const std::function<double(double)>& f,
                            std::vector<double> breakpoints,
                            const GaussLegendre& rule = gauss_legendre_128());

}  // namespace matbf
