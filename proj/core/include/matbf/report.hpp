#pragma once

#include <iosfwd>
#include <string>

#include "matbf/detector.hpp"

namespace matbf {

// Serialized forms of detector output. Doubles are written with 17 significant
// digits and non-finite values as JSON null, so identical inputs give
// byte-identical files.

void write_report_json(std::ostream& out, const DecisionReport& rep);
/// Tidy long format `t,metric,value`.
void write_report_csv(std::ostream& out, const DecisionReport& rep);
/// `t,alpha,log_H,log_kappa` for the optional curve grid and fixed alphas.
void write_curve_csv(std::ostream& out, const DecisionReport& rep);
/// `t,level,count,rows,cols`.
void write_classical_csv(std::ostream& out, const ClassicalReport& rep);

std::string calibration_to_json(const CalibrationResult& cal, int indent = 2);
/// InputError on malformed or incomplete JSON.
CalibrationResult calibration_from_json(const std::string& text);

}  // namespace matbf
