#include "matbf/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "matbf/detector.hpp"
#include "matbf/errors.hpp"
#include "matbf/io.hpp"
#include "matbf/parallel.hpp"
#include "matbf/rng.hpp"

namespace matbf {

namespace {

// k distinct indices from [0, N), partial Fisher-Yates.
std::vector<int> choose(int N, int k, CounterRng& rng) {
  std::vector<int> idx(static_cast<std::size_t>(N));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(N - i)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

ProbabilityCell make_cell(std::size_t above, std::size_t inside, std::size_t below) {
  ProbabilityCell c;
  c.count = above + inside + below;
  if (c.count == 0) return c;
  const double N = static_cast<double>(c.count);
  c.p_I = above / N;
  c.p_III = below / N;
  c.p_II = 1.0 - c.p_I - c.p_III;  // exact partition
  const auto se = [N](double q) { return std::sqrt(q * (1.0 - q) / N); };
  c.se_I = se(c.p_I);
  c.se_II = se(c.p_II);
  c.se_III = se(c.p_III);
  return c;
}

}  // namespace

void Scenario::validate() const {
  if (p < 1 || n < 1) throw InputError("scenario: p and n must be positive");
  if (T < 3) throw InputError("scenario: T must be at least 3");
  if (outlier_time < 1 || outlier_time > T) throw InputError("scenario: outlier time outside 1..T");
  if (!std::isfinite(u) || u < 0.0) throw InputError("scenario: u must be finite and >= 0");
  if (replications < 1) throw InputError("scenario: at least one replication required");
  switch (mask) {
    case MaskKind::all: break;
    case MaskKind::row_col:
      if (mask_rows < 1 || mask_rows > p || mask_cols < 1 || mask_cols > n)
        throw InputError("scenario: row/column mask must fit inside p x n");
      break;
    case MaskKind::random_entries:
      if (mask_entries < 1 || mask_entries > p * n)
        throw InputError("scenario: mask entry count must lie in 1..pn");
      break;
  }
}

std::string Scenario::label() const {
  std::ostringstream s;
  s << "u=" << format_double(u) << ";mask=";
  switch (mask) {
    case MaskKind::all: s << "all"; break;
    case MaskKind::row_col: s << mask_rows << 'x' << mask_cols; break;
    case MaskKind::random_entries: s << mask_entries; break;
  }
  return s.str();
}

Scenario case1() { return Scenario{}; }

Scenario case2() {
  Scenario s;
  s.p = 50;
  s.n = 50;
  s.replications = 25;
  return s;
}

Mat make_mask(const Scenario& sc, std::uint64_t rng_seed) {
  Mat R = Mat::Zero(sc.p, sc.n);
  CounterRng rng(rng_seed);
  switch (sc.mask) {
    case MaskKind::all: R.setOnes(); break;
    case MaskKind::row_col:
    {
      const auto rows = choose(sc.p, sc.mask_rows, rng);
      const auto cols = choose(sc.n, sc.mask_cols, rng);
      for (int i : rows)
        for (int j : cols) R(i, j) = 1.0;
      break;
    }
    case MaskKind::random_entries:
      for (int e : choose(sc.p * sc.n, sc.mask_entries, rng)) R(e % sc.p, e / sc.p) = 1.0;
      break;
  }
  return R;
}

ScenarioDraw generate_scenario_draw(const Scenario& sc, std::size_t rep) {
  sc.validate();
  const std::uint64_t base = derive_seed(sc.seed, rep);
  ScenarioDraw d;
  CounterRng par(base, 0);
  d.M = par.normal_matrix(sc.p, sc.n);
  d.S = par.normal_matrix(sc.p, sc.p);
  d.G = par.normal_matrix(sc.n, sc.n);
  d.R = make_mask(sc, derive_seed(base, 1));
  CounterRng noise(base, 2);
  d.series = MatrixSeries(sc.p, sc.n);
  for (long t = 1; t <= sc.T; ++t) {
    // E_t = S Z G' has row covariance S S' and column covariance G G'.
    Mat X = d.M + d.S * noise.normal_matrix(sc.p, sc.n) * d.G.transpose();
    if (t == sc.outlier_time) X += sc.u * d.R;
    d.series.push_back(t, std::move(X));
  }
  return d;
}

MatrixSeries generate_scenario(const Scenario& sc, std::size_t rep) {
  return generate_scenario_draw(sc, rep).series;
}

PowerTable estimate_probabilities(const Scenario& sc, const SimConfig& cfg) {
  sc.validate();
  if (cfg.window < 2 || static_cast<long>(cfg.window) >= sc.outlier_time)
    throw InputError("simulation: window must lie in [2, outlier_time - 1]");

  DetectorConfig dc;
  dc.window = cfg.window;
  dc.tau = cfg.tau;
  dc.beta = cfg.beta;
  dc.calibration = cfg.calibration;
  dc.robust = false;
  dc.classical = false;

  PowerTable table;
  table.scenario = sc;
  table.J = sc.replications;
  table.calibration = calibrate_production(sc.p, sc.n, static_cast<double>(cfg.window),
                                           static_cast<long>(cfg.window), cfg.tau, cfg.beta,
                                           cfg.calibration);
  dc.calibration_override = table.calibration;

  struct Tally {
    std::size_t alt[3] = {0, 0, 0};
    std::size_t null[3] = {0, 0, 0};
  };
  const auto bucket = [&](Decision d) {
    return d == Decision::accept_null ? 0 : (d == Decision::reject_null ? 2 : 1);
  };
  std::vector<Tally> tallies(sc.replications);
  parallel_for(sc.replications, [&](std::size_t j) {
    const ScenarioDraw draw = generate_scenario_draw(sc, j);
    DetectorConfig local = dc;
    if (cfg.oracle_v) local.V = symmetrize(draw.G * draw.G.transpose());
    const DecisionReport rep = run_sequential(draw.series, local);
    Tally& tl = tallies[j];
    for (const auto& row : rep.rows) {
      const int b = bucket(row.decision);
      if (row.t == sc.outlier_time)
        ++tl.alt[b];
      else if (cfg.null_time ? row.t == *cfg.null_time : true)
        ++tl.null[b];
    }
  });
  Tally sum;
  for (const auto& tl : tallies)
    for (int b = 0; b < 3; ++b) {
      sum.alt[b] += tl.alt[b];
      sum.null[b] += tl.null[b];
    }
  table.alternative = make_cell(sum.alt[0], sum.alt[1], sum.alt[2]);
  table.null = make_cell(sum.null[0], sum.null[1], sum.null[2]);
  return table;
}

void write_power_tables_csv(std::ostream& out, const std::vector<PowerTable>& tables) {
  if (tables.empty()) throw InputError("write_power_tables_csv: no tables");
  out << "probability,H0";
  for (const auto& t : tables) out << ',' << t.scenario.label();
  out << '\n';
  const char* names[3] = {"P(H>h_upper)", "P(h_lower<H<h_upper)", "P(H<h_lower)"};
  const auto pick = [](const ProbabilityCell& c, int r) {
    return r == 0 ? c.p_I : (r == 1 ? c.p_II : c.p_III);
  };
  for (int r = 0; r < 3; ++r) {
    out << names[r] << ',' << format_double(pick(tables.front().null, r));
    for (const auto& t : tables) out << ',' << format_double(pick(t.alternative, r));
    out << '\n';
  }
}

std::string to_string(MaskKind k) {
  switch (k) {
    case MaskKind::all: return "all";
    case MaskKind::row_col: return "row_col";
    case MaskKind::random_entries: return "random_entries";
  }
  return "all";
}

}  // namespace matbf
