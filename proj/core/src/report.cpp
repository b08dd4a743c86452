#include "matbf/report.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "matbf/errors.hpp"
#include "matbf/io.hpp"

namespace matbf {

namespace {

using nlohmann::ordered_json;

ordered_json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json weight_json(const TruncatedBeta& w) {
  return {{"a", w.a}, {"b", w.b}, {"lower", w.lower}, {"upper", w.upper}};
}

ordered_json calibration_json(const CalibrationResult& c) {
  return {{"alpha_star", c.alpha_star},       {"h_lower", c.h_lower},
          {"h_upper", c.h_upper},             {"tau", c.tau},
          {"beta", c.beta},                   {"achieved_power", c.achieved_power},
          {"feasible", c.feasible},           {"convention", to_string(c.convention)},
          {"size_residual", c.size_residual}};
}

void csv_row(std::ostream& out, long t, const std::string& metric, double v) {
  out << t << ',' << metric << ',' << format_double(v) << '\n';
}

}  // namespace

void write_report_json(std::ostream& out, const DecisionReport& rep) {
  ordered_json j;
  j["p"] = rep.p;
  j["n"] = rep.n;
  j["window"] = rep.window;
  j["regime"] = to_string(rep.regime);
  j["calibration"] = calibration_json(rep.calibration);
  j["weights"] = ordered_json::array();
  for (const auto& w : rep.weights) j["weights"].push_back(weight_json(w));
  j["alpha_fixed"] = rep.alpha_fixed;
  j["curve_grid"] = rep.curve_grid;
  if (rep.classical) {
    j["classical"] = {{"levels", rep.classical->levels},
                      {"nominal_levels", rep.classical->nominal_levels},
                      {"bonferroni", rep.classical->bonferroni},
                      {"entry_errors", rep.classical->entry_errors}};
  }
  auto rows = ordered_json::array();
  for (const auto& r : rep.rows) {
    ordered_json o;
    o["t"] = r.t;
    o["alpha_star"] = r.alpha_star;
    o["log_H"] = num(r.log_H);
    o["H"] = num(r.H);
    o["log_kappa"] = num(r.log_kappa);
    o["kappa"] = num(r.kappa);
    o["h_lower"] = r.h_lower;
    o["h_upper"] = r.h_upper;
    o["decision"] = to_string(r.decision);
    o["jeffreys"] = r.jeffreys;
    if (!r.ibf.empty() || !r.robust_error.empty()) {
      o["mbf"] = {{"alpha_min", r.mbf.alpha_min}, {"log_mbf", num(r.mbf.log_mbf)},
                  {"mbf", num(r.mbf.mbf)}};
      auto ibf = ordered_json::array(), err = ordered_json::array(),
           nibf = ordered_json::array();
      for (std::size_t k = 0; k < r.ibf.size(); ++k) {
        ibf.push_back(num(r.ibf[k]));
        err.push_back(num(r.ibf_error[k]));
        nibf.push_back(num(r.nibf[k]));
      }
      o["ibf"] = ibf;
      o["ibf_error"] = err;
      o["nibf"] = nibf;
      if (!r.robust_error.empty()) o["robust_error"] = r.robust_error;
    }
    if (!r.log_H_fixed.empty()) {
      auto f = ordered_json::array();
      for (double v : r.log_H_fixed) f.push_back(num(v));
      o["log_H_fixed"] = f;
    }
    if (!r.classical_counts.empty()) o["classical_counts"] = r.classical_counts;
    rows.push_back(std::move(o));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << '\n';
}

void write_report_csv(std::ostream& out, const DecisionReport& rep) {
  out << "t,metric,value\n";
  for (const auto& r : rep.rows) {
    csv_row(out, r.t, "alpha_star", r.alpha_star);
    csv_row(out, r.t, "log_H", r.log_H);
    csv_row(out, r.t, "H", r.H);
    csv_row(out, r.t, "log_kappa", r.log_kappa);
    csv_row(out, r.t, "kappa", r.kappa);
    csv_row(out, r.t, "h_lower", r.h_lower);
    csv_row(out, r.t, "h_upper", r.h_upper);
    // -1 reject, 0 inconclusive, +1 accept.
    csv_row(out, r.t, "decision",
            r.decision == Decision::reject_null ? -1.0
                                                : (r.decision == Decision::accept_null ? 1.0 : 0.0));
    if (!r.ibf.empty()) {
      csv_row(out, r.t, "mbf", r.mbf.mbf);
      csv_row(out, r.t, "mbf_alpha", r.mbf.alpha_min);
      for (std::size_t k = 0; k < r.ibf.size(); ++k) {
        csv_row(out, r.t, "ibf_" + std::to_string(k + 1), r.ibf[k]);
        csv_row(out, r.t, "nibf_" + std::to_string(k + 1), r.nibf[k]);
      }
    }
    for (std::size_t k = 0; k < r.log_H_fixed.size(); ++k)
      csv_row(out, r.t, "log_H_alpha_" + format_double(rep.alpha_fixed[k]), r.log_H_fixed[k]);
  }
}

void write_curve_csv(std::ostream& out, const DecisionReport& rep) {
  out << "t,alpha,log_H,log_kappa\n";
  for (const auto& r : rep.rows)
    for (const auto& e : r.curve)
      out << r.t << ',' << format_double(e.alpha) << ',' << format_double(e.log_H) << ','
          << format_double(e.log_kappa) << '\n';
}

void write_classical_csv(std::ostream& out, const ClassicalReport& rep) {
  out << "t,level,count,rows,cols\n";
  for (std::size_t l = 0; l < rep.levels.size(); ++l)
    for (std::size_t s = 0; s < rep.times.size(); ++s)
      out << rep.times[s] << ',' << format_double(rep.nominal_levels[l]) << ','
          << rep.count_per_time[l][s] << ',' << rep.rows_per_time[l][s] << ','
          << rep.cols_per_time[l][s] << '\n';
}

std::string calibration_to_json(const CalibrationResult& cal, int indent) {
  return calibration_json(cal).dump(indent);
}

CalibrationResult calibration_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    CalibrationResult c;
    c.alpha_star = j.at("alpha_star").get<double>();
    c.h_lower = j.at("h_lower").get<double>();
    c.h_upper = j.at("h_upper").get<double>();
    c.tau = j.at("tau").get<double>();
    c.beta = j.at("beta").get<double>();
    c.achieved_power = j.at("achieved_power").get<double>();
    c.feasible = j.at("feasible").get<bool>();
    const std::string conv = j.at("convention").get<std::string>();
    if (conv == "upper_survival")
      c.convention = PowerConvention::upper_survival;
    else if (conv == "upper_cdf")
      c.convention = PowerConvention::upper_cdf;
    else
      throw InputError("unknown power convention '" + conv + "'");
    c.size_residual = j.value("size_residual", 0.0);
    if (!(c.h_lower > 0.0 && c.h_lower < c.h_upper))
      throw InputError("calibration thresholds out of order");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("calibration JSON: ") + e.what());
  }
}

}  // namespace matbf
