#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matbf/types.hpp"

namespace matbf {

struct GrubbsResult {
  double G = 0.0;
  double critical = 0.0;
  std::size_t argmax = 0;                // 0-based index of the most extreme point
  std::optional<std::size_t> flagged;    // set when G > critical
};

/// Two-sided Grubbs test. InputError for fewer than 3 points or level outside
/// (0, 1); DomainError for zero sample variance.
GrubbsResult grubbs_test(const std::vector<double>& x, double alpha_level);

/// Rosner's generalized ESD. Returns 0-based indices, in removal order.
std::vector<std::size_t> gesd_test(const std::vector<double>& x, std::size_t max_outliers,
                                   double alpha_level);

/// ceil(0.1 * length).
std::size_t default_gesd_cap(std::size_t length);

enum class ClassicalTest { grubbs, gesd };

struct ClassicalOptions {
  ClassicalTest test = ClassicalTest::gesd;
  std::vector<double> levels{0.01, 0.05};
  bool bonferroni = false;
  std::optional<std::size_t> max_outliers;  // GESD cap; default_gesd_cap when unset
  std::optional<std::size_t> window;        // trailing window; full history when unset
};

/// Flags are indexed [level][entry][time], entry = i + j * p (column-major).
struct ClassicalReport {
  int p = 0, n = 0;
  std::vector<long> times;
  std::vector<double> levels;          // effective levels after any correction
  std::vector<double> nominal_levels;  // as requested
  bool bonferroni = false;
  std::vector<std::vector<std::vector<unsigned char>>> flags;
  std::vector<std::vector<long>> count_per_time;  // [level][time]
  std::vector<std::vector<long>> rows_per_time;   // rows with >= 1 flagged entry
  std::vector<std::vector<long>> cols_per_time;   // columns with >= 1 flagged entry
  std::vector<std::string> entry_errors;          // "i,j: message"

  bool flag(std::size_t level, int i, int j, std::size_t time) const {
    return flags[level][static_cast<std::size_t>(i + j * p)][time] != 0;
  }
};

ClassicalReport elementwise_scan(const MatrixSeries& series, const ClassicalOptions& opts);

}  // namespace matbf
