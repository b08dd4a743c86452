#include "matbf/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "matbf/errors.hpp"

namespace matbf {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long parse_long(const std::string& s, const std::string& where) {
  if (s.empty()) throw InputError(where + ": empty integer field");
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size())
    throw InputError(where + ": invalid integer '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& where) {
  if (s.empty()) throw InputError(where + ": empty value field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno == ERANGE || end != s.c_str() + s.size())
    throw InputError(where + ": invalid number '" + s + "'");
  return v;
}

std::ifstream open_or_throw(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + what + " file '" + path + "'");
  return in;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Manifest parse_manifest(std::istream& in, const std::string& source) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source + ": malformed JSON (" + e.what() + ")");
  }
  Manifest m;
  try {
    if (!j.contains("p") || !j.contains("n"))
      throw InputError(source + ": manifest requires integer fields 'p' and 'n'");
    m.p = j.at("p").get<int>();
    m.n = j.at("n").get<int>();
    if (j.contains("row_labels")) m.row_labels = j.at("row_labels").get<std::vector<std::string>>();
    if (j.contains("col_labels")) m.col_labels = j.at("col_labels").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source + ": invalid manifest field (" + e.what() + ")");
  }
  if (m.p < 1 || m.n < 1) throw InputError(source + ": p and n must be positive");
  if (!m.row_labels.empty() && static_cast<int>(m.row_labels.size()) != m.p)
    throw InputError(source + ": row_labels length differs from p");
  if (!m.col_labels.empty() && static_cast<int>(m.col_labels.size()) != m.n)
    throw InputError(source + ": col_labels length differs from n");
  return m;
}

Manifest read_manifest(const std::string& path) {
  auto in = open_or_throw(path, "manifest");
  return parse_manifest(in, path);
}

void write_manifest(std::ostream& out, const MatrixSeries& series) {
  nlohmann::json j;
  j["p"] = series.p();
  j["n"] = series.n();
  j["row_labels"] = series.row_labels();
  j["col_labels"] = series.col_labels();
  out << j.dump(2) << "\n";
}

MatrixSeries parse_series_csv(std::istream& in, const Manifest& manifest,
                              const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty file");
  if (trim(line) != "t,row,col,value")
    throw InputError(source + ": header must be 't,row,col,value'");

  const int p = manifest.p, n = manifest.n;
  std::map<long, std::pair<Mat, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>>> cells;
  long last_t = 0;
  bool have_t = false;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto f = split_commas(body);
    if (f.size() != 4) throw InputError(where + ": expected 4 fields");
    const long t = parse_long(f[0], where);
    const long r = parse_long(f[1], where);
    const long c = parse_long(f[2], where);
    const double v = parse_double(f[3], where);
    if (r < 1 || r > p || c < 1 || c > n)
      throw InputError(where + ": cell (" + f[1] + "," + f[2] + ") outside the manifest shape");
    if (have_t && t < last_t)
      throw InputError(where + ": time index " + f[0] + " decreases");
    have_t = true;
    last_t = t;
    auto it = cells.find(t);
    if (it == cells.end()) {
      it = cells.emplace(t, std::make_pair(Mat::Zero(p, n),
                                           Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(p, n, false)))
               .first;
    }
    auto& [Y, seen] = it->second;
    if (seen(r - 1, c - 1))
      throw InputError(where + ": duplicate cell (t=" + f[0] + ", row=" + f[1] + ", col=" + f[2] + ")");
    seen(r - 1, c - 1) = true;
    Y(r - 1, c - 1) = v;
  }

  MatrixSeries series(p, n, manifest.row_labels, manifest.col_labels);
  for (auto& [t, entry] : cells) {
    auto& [Y, seen] = entry;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < p; ++i)
        if (!seen(i, j))
          throw InputError(source + ": missing cell (t=" + std::to_string(t) + ", row=" +
                           std::to_string(i + 1) + ", col=" + std::to_string(j + 1) + ")");
    series.push_back(t, std::move(Y));
  }
  return series;
}

MatrixSeries read_series(const std::string& csv_path, const std::string& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  auto in = open_or_throw(csv_path, "data");
  return parse_series_csv(in, m, csv_path);
}

void write_series_csv(std::ostream& out, const MatrixSeries& series) {
  out << "t,row,col,value\n";
  for (const auto& o : series.obs())
    for (int i = 0; i < series.p(); ++i)
      for (int j = 0; j < series.n(); ++j)
        out << o.t << ',' << i + 1 << ',' << j + 1 << ',' << format_double(o.Y(i, j)) << '\n';
}

Mat read_dense_csv(const std::string& path) {
  auto in = open_or_throw(path, "matrix");
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty()) continue;
    std::vector<double> row;
    for (const auto& f : split_commas(body))
      row.push_back(parse_double(f, path + ":" + std::to_string(lineno)));
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + ": empty matrix file");
  Mat A(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) A(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
  return A;
}

}  // namespace matbf
