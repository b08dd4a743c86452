#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matbf/calibrate.hpp"
#include "matbf/types.hpp"

namespace matbf {

enum class MaskKind { all, row_col, random_entries };

struct Scenario {
  int p = 30;
  int n = 10;
  long T = 100;
  long outlier_time = 80;  // 1-based
  double u = 0.0;          // 0 gives a null stream
  MaskKind mask = MaskKind::all;
  int mask_rows = 0;       // row_col
  int mask_cols = 0;       // row_col
  int mask_entries = 0;    // random_entries
  std::size_t replications = 100;
  std::uint64_t seed = 1;

  void validate() const;
  std::string label() const;  // e.g. "u=15;mask=20x10"
};

/// p = 30, n = 10, J = 100.
Scenario case1();
/// p = n = 50, J = 25 (desk scale).
Scenario case2();

struct ScenarioDraw {
  Mat M;
  Mat S;  // Sigma = S S'
  Mat G;  // Psi = G G'
  Mat R;  // binary outlier mask
  MatrixSeries series;
};

/// Replication `rep` of the scenario; fully determined by (seed, rep).
ScenarioDraw generate_scenario_draw(const Scenario& sc, std::size_t rep = 0);
MatrixSeries generate_scenario(const Scenario& sc, std::size_t rep = 0);

/// Binary p x n mask; `rng_seed` fixes the random rows, columns or entries.
Mat make_mask(const Scenario& sc, std::uint64_t rng_seed);

struct SimConfig {
  std::size_t window = 79;  // phi = w = training observations before t = 80
  double tau = 0.01;
  double beta = 0.8;
  CalibrationOptions calibration;
  /// Known-V column covariance handed to the detector: the generating
  /// Psi = G G' of each replication, or the detector's identity default.
  bool oracle_v = true;
  /// Null column: pooled over evaluable t != outlier_time, or one fixed t.
  std::optional<long> null_time;
};

struct ProbabilityCell {
  double p_I = 0.0;    // P(H > h_upper)
  double p_II = 0.0;   // P(h_lower <= H <= h_upper)
  double p_III = 0.0;  // P(H < h_lower)
  double se_I = 0.0, se_II = 0.0, se_III = 0.0;
  std::size_t count = 0;
};

struct PowerTable {
  Scenario scenario;
  std::size_t J = 0;
  CalibrationResult calibration;
  ProbabilityCell alternative;  // at outlier_time
  ProbabilityCell null;         // pooled t != outlier_time (or null_time)
};

PowerTable estimate_probabilities(const Scenario& sc, const SimConfig& cfg);

/// Probability rows by scenario columns; the first column is the null cell of
/// the first table.
void write_power_tables_csv(std::ostream& out, const std::vector<PowerTable>& tables);

std::string to_string(MaskKind k);

}  // namespace matbf
