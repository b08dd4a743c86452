#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "matbf/types.hpp"

namespace matbf {

struct Manifest {
  int p = 0;
  int n = 0;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

// Manifest: {"p": int, "n": int, "row_labels": [...], "col_labels": [...]}.
Manifest parse_manifest(std::istream& in, const std::string& source = "manifest");
Manifest read_manifest(const std::string& path);
void write_manifest(std::ostream& out, const MatrixSeries& series);

// Long CSV with header `t,row,col,value`; row/col are 1-based. Lines must be
// grouped by non-decreasing t; every (t,row,col) cell must appear exactly once.
MatrixSeries parse_series_csv(std::istream& in, const Manifest& manifest,
                              const std::string& source = "data");
MatrixSeries read_series(const std::string& csv_path, const std::string& manifest_path);
void write_series_csv(std::ostream& out, const MatrixSeries& series);

/// Dense matrix from a headerless comma-separated file.
Mat read_dense_csv(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace matbf
