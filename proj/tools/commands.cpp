#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include "matbf/calibrate.hpp"
#include "matbf/detector.hpp"
#include "matbf/errors.hpp"
#include "matbf/io.hpp"
#include "matbf/report.hpp"
#include "matbf/simlab.hpp"
#include "matbf/version.hpp"
#include "run_manifest.hpp"

namespace fs = std::filesystem;

namespace matbf::cli {

namespace {

using json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::ofstream out(fs::path(dir) / name, std::ios::binary);
  if (!out) throw InputError("cannot write '" + (fs::path(dir) / name).string() + "'");
  return out;
}

PowerConvention parse_convention(const std::string& s) {
  if (s == "upper_survival") return PowerConvention::upper_survival;
  if (s == "upper_cdf") return PowerConvention::upper_cdf;
  throw InputError("unknown power convention '" + s + "' (upper_survival|upper_cdf)");
}

CalibrationOptions calibration_options(const json& cfg) {
  CalibrationOptions o;
  o.convention = parse_convention(cfg.value("convention", "upper_survival"));
  o.alpha_lo = cfg.value("alpha_lo", o.alpha_lo);
  o.alpha_hi = cfg.value("alpha_hi", o.alpha_hi);
  o.prescan = cfg.value("prescan", o.prescan);
  return o;
}

void parse_mask(const std::string& s, Scenario& sc) {
  static const std::regex rc(R"((\d+)x(\d+))"), count(R"(\d+)");
  std::smatch m;
  if (s == "all") {
    sc.mask = MaskKind::all;
  } else if (std::regex_match(s, m, rc)) {
    sc.mask = MaskKind::row_col;
    sc.mask_rows = std::stoi(m[1]);
    sc.mask_cols = std::stoi(m[2]);
  } else if (std::regex_match(s, count)) {
    sc.mask = MaskKind::random_entries;
    sc.mask_entries = std::stoi(s);
  } else {
    throw InputError("bad mask '" + s + "' (all | RxC | N)");
  }
}

}  // namespace

CommandResult run_detect(const json& cfg, const std::string& out_dir) {
  CommandResult res;
  const std::string data = cfg.at("data"), manifest = cfg.at("manifest");
  if (!fs::exists(manifest)) throw InputError("manifest file '" + manifest + "' not found");
  if (!fs::exists(data)) throw InputError("data file '" + data + "' not found");
  res.inputs[data] = sha256_file(data);
  res.inputs[manifest] = sha256_file(manifest);
  const MatrixSeries series = read_series(data, manifest);

  DetectorConfig dc;
  dc.window = cfg.at("window").get<std::size_t>();
  dc.tau = cfg.at("tau");
  dc.beta = cfg.at("beta");
  const std::string regime = cfg.value("regime", "known_v");
  if (regime == "known_v")
    dc.regime = Regime::known_v;
  else if (regime == "unknown_v")
    dc.regime = Regime::unknown_v;
  else
    throw InputError("unknown regime '" + regime + "' (known_v|unknown_v)");
  dc.alpha_fixed = cfg.value("alpha_grid", std::vector<double>{});
  dc.curve_grid = cfg.value("curve_grid", std::vector<double>{});
  dc.robust = cfg.value("robust", true);
  dc.classical = cfg.value("classical", true);
  dc.freeze_sigma = cfg.value("freeze_sigma", false);
  dc.calibration = calibration_options(cfg);
  dc.seed = cfg.value("seed", std::uint64_t{1});
  dc.mc_draws = cfg.value("mc_draws", std::size_t{10000});
  res.seed = dc.seed;
  if (cfg.contains("sigma_l") && !cfg["sigma_l"].is_null()) {
    const std::string path = cfg["sigma_l"];
    res.inputs[path] = sha256_file(path);
    dc.sigma_l = read_dense_csv(path);
    dc.sigma_estimator = SigmaEstimator::user_supplied;
  }
  if (cfg.contains("v") && !cfg["v"].is_null()) {
    const std::string path = cfg["v"];
    res.inputs[path] = sha256_file(path);
    dc.V = read_dense_csv(path);
  }
  const std::string test = cfg.value("classical_test", "gesd");
  if (test != "gesd" && test != "grubbs")
    throw InputError("unknown classical test '" + test + "' (gesd|grubbs)");
  dc.classical_opts.test = test == "gesd" ? ClassicalTest::gesd : ClassicalTest::grubbs;
  dc.classical_opts.levels = cfg.value("levels", std::vector<double>{0.01, 0.05});
  dc.classical_opts.bonferroni = cfg.value("bonferroni", false);
  if (cfg.contains("gesd_max") && !cfg["gesd_max"].is_null())
    dc.classical_opts.max_outliers = cfg["gesd_max"].get<std::size_t>();
  if (cfg.contains("classical_window") && !cfg["classical_window"].is_null())
    dc.classical_opts.window = cfg["classical_window"].get<std::size_t>();

  const DecisionReport rep = run_sequential(series, dc);
  {
    auto out = open_out(out_dir, "report.json");
    write_report_json(out, rep);
  }
  {
    auto out = open_out(out_dir, "report.csv");
    write_report_csv(out, rep);
  }
  res.outputs = {"report.json", "report.csv"};
  if (!dc.curve_grid.empty()) {
    auto out = open_out(out_dir, "bf_curve.csv");
    write_curve_csv(out, rep);
    res.outputs.push_back("bf_curve.csv");
  }
  if (rep.classical) {
    auto out = open_out(out_dir, "classical.csv");
    write_classical_csv(out, *rep.classical);
    res.outputs.push_back("classical.csv");
  }
  std::size_t rejects = 0;
  for (const auto& r : rep.rows) rejects += r.decision == Decision::reject_null;
  std::cerr << "detect: " << rep.rows.size() << " evaluated, " << rejects
            << " rejected (alpha* = " << format_double(rep.calibration.alpha_star) << ")\n";
  return res;
}

CommandResult run_simulate(const json& cfg, const std::string& out_dir) {
  CommandResult res;
  const int which = cfg.value("case", 1);
  if (which != 1 && which != 2) throw InputError("--case must be 1 or 2");
  Scenario base = which == 1 ? case1() : case2();
  if (cfg.contains("reps") && !cfg["reps"].is_null()) base.replications = cfg["reps"];
  base.seed = cfg.value("seed", std::uint64_t{1});
  res.seed = base.seed;
  SimConfig sc;
  sc.window = cfg.value("window", sc.window);
  sc.tau = cfg.value("tau", sc.tau);
  sc.beta = cfg.value("beta", sc.beta);
  sc.calibration = calibration_options(cfg);
  sc.oracle_v = !cfg.value("identity_v", false);
  if (cfg.contains("null_time") && !cfg["null_time"].is_null()) sc.null_time = cfg["null_time"].get<long>();

  const auto us = cfg.value("u", std::vector<double>{15.0});
  const auto masks = cfg.value("mask", std::vector<std::string>{"all"});
  if (us.empty() || masks.empty()) throw InputError("simulate: need at least one u and one mask");
  std::vector<PowerTable> tables;
  for (double u : us)
    for (const auto& m : masks) {
      Scenario s = base;
      s.u = u;
      parse_mask(m, s);
      s.validate();
      tables.push_back(estimate_probabilities(s, sc));
    }
  {
    auto out = open_out(out_dir, "power_table.csv");
    write_power_tables_csv(out, tables);
  }
  {
    json j = json::array();
    for (const auto& t : tables) {
      const auto cell = [](const ProbabilityCell& c) {
        return json{{"p_I", c.p_I},   {"p_II", c.p_II},   {"p_III", c.p_III}, {"se_I", c.se_I},
                    {"se_II", c.se_II}, {"se_III", c.se_III}, {"count", c.count}};
      };
      j.push_back({{"scenario", t.scenario.label()},
                   {"p", t.scenario.p},
                   {"n", t.scenario.n},
                   {"J", t.J},
                   {"alpha_star", t.calibration.alpha_star},
                   {"h_lower", t.calibration.h_lower},
                   {"h_upper", t.calibration.h_upper},
                   {"calibration_feasible", t.calibration.feasible},
                   {"alternative", cell(t.alternative)},
                   {"null", cell(t.null)}});
    }
    auto out = open_out(out_dir, "power_table.json");
    out << j.dump(2) << '\n';
  }
  res.outputs = {"power_table.csv", "power_table.json"};
  return res;
}

CommandResult run_calibrate(const json& cfg, const std::string& out_dir) {
  CommandResult res;
  const int p = cfg.at("p"), n = cfg.at("n");
  const double phi = cfg.at("phi");
  const long T = cfg.at("T");
  const CalibrationResult r =
      calibrate_production(p, n, phi, T, cfg.at("tau"), cfg.at("beta"), calibration_options(cfg));
  const std::string text = calibration_to_json(r);
  {
    auto out = open_out(out_dir, "calibration.json");
    out << text << '\n';
  }
  std::cout << text << '\n';
  res.outputs = {"calibration.json"};
  if (!r.feasible) {
    std::cerr << "calibrate: no alpha in [" << format_double(cfg.value("alpha_lo", 0.01)) << ", "
              << format_double(cfg.value("alpha_hi", 0.99)) << "] reaches power "
              << format_double(r.beta) << "; best " << format_double(r.achieved_power)
              << " at alpha = " << format_double(r.alpha_star) << '\n';
    res.code = kInfeasible;
  }
  return res;
}

int execute(const std::string& command, const json& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  RunManifest m;
  m.command = command;
  m.tool_version = kVersion;
  m.config = cfg;
  m.started_at = utc_now();
  CommandResult res;
  if (command == "detect")
    res = run_detect(cfg, out_dir);
  else if (command == "simulate")
    res = run_simulate(cfg, out_dir);
  else if (command == "calibrate")
    res = run_calibrate(cfg, out_dir);
  else
    throw InputError("unknown command '" + command + "'");
  m.seed = res.seed;
  m.inputs = res.inputs;
  for (const auto& f : res.outputs) m.outputs[f] = sha256_file((fs::path(out_dir) / f).string());
  m.finished_at = utc_now();
  write_run_manifest(out_dir, m);
  return res.code;
}

int replay(const std::string& manifest_path, const std::string& out_dir) {
  const RunManifest m = read_run_manifest(manifest_path);
  for (const auto& [path, digest] : m.inputs)
    if (sha256_file(path) != digest)
      throw InputError("replay: input '" + path + "' changed since the recorded run");
  const int code = execute(m.command, m.config, out_dir);
  const RunManifest again = read_run_manifest((fs::path(out_dir) / "run_manifest.json").string());
  std::size_t same = 0;
  for (const auto& [name, digest] : m.outputs) {
    const auto it = again.outputs.find(name);
    const bool ok = it != again.outputs.end() && it->second == digest;
    same += ok;
    if (!ok) std::cerr << "replay: " << name << " differs\n";
  }
  std::cerr << "replay: " << same << "/" << m.outputs.size() << " outputs identical\n";
  if (same != m.outputs.size()) return kNumerical;
  return code;
}

}  // namespace matbf::cli
