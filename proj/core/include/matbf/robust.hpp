#pragma once

#include <functional>
#include <optional>
#include <string>

namespace matbf {

/// Beta(a, b) density restricted to (lower, upper) and renormalized.
struct TruncatedBeta {
  double a = 1.0;
  double b = 1.0;
  double lower = 0.0;
  double upper = 1.0;

  void validate() const;
  double log_normalizer() const;  // log[B(a,b) (I_upper - I_lower)]
  double log_pdf(double x) const;
  double pdf(double x) const;
  double mean() const;  // of the untruncated beta
  double sd() const;
};

/// a = np/2 + 1e-4 and b placing the beta mode at `mode`. The two defaults
/// used by the detector are mode 0.7 and mode 0.3.
TruncatedBeta default_weight(int p, int n, double mode, double lower = 0.0, double upper = 1.0);

enum class Regime { known_v, unknown_v };

/// nullopt when integrable; otherwise a description of the violated inequality.
/// known V: a > np/2. unknown V: a > 1 and lower >= (2n + p) / m_d.
std::optional<std::string> integrability_guard(Regime regime, int p, int n,
                                               std::optional<double> m_d,
                                               const TruncatedBeta& weight);

struct MinimumBF {
  double alpha_min = 1.0;
  double log_mbf = 0.0;
  double mbf = 1.0;
};

/// Minimum of exp(log_bf) on [lo, hi], 0 < lo < hi: 256-point log-spaced
/// scan then golden-section refinement in the best bracket.
MinimumBF minimum_bf(const std::function<double(double)>& log_bf, double lo, double hi);

/// Where the integrand may blow up at the lower end of the weight support.
struct IntegrandInfo {
  Regime regime = Regime::known_v;
  int p = 1;
  int n = 1;
  double alpha_low = 0.0;  // pole of the unknown-V integrand; 0 for known V
};

struct IntegratedBF {
  double value = 0.0;  // integral of H pi minus 1
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Integral of exp(log_bf) against the weight, minus 1. Throws DomainError
/// when integrability_guard fails. Unknown V integrates from
/// max(lower, alpha_low + 1e-6).
IntegratedBF integrated_bf(const std::function<double(double)>& log_bf,
                           const TruncatedBeta& weight, const IntegrandInfo& info);

/// (IBF of H) / (IBF of kappa). NumericalError when the denominator is
/// below 1e-12.
double normalized_ibf(const std::function<double(double)>& log_bf,
                      const std::function<double(double)>& log_kappa,
                      const TruncatedBeta& weight, const IntegrandInfo& info);

struct RobustBFs {
  MinimumBF mbf;
  double ibf = 0.0;
  double nibf = 0.0;
};

}  // namespace matbf
