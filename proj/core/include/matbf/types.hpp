#pragma once

#include <string>
#include <vector>

#include "matbf/linalg.hpp"

namespace matbf {

struct MatrixObs {
  long t = 0;  // 1-based time index
  Mat Y;
};

/// Time-indexed sequence of p x n matrices sharing one shape manifest.
/// Indices are strictly increasing; gaps are allowed.
class MatrixSeries {
 public:
  MatrixSeries() = default;
  MatrixSeries(int p, int n, std::vector<std::string> row_labels = {},
               std::vector<std::string> col_labels = {});

  int p() const { return p_; }
  int n() const { return n_; }
  std::size_t size() const { return obs_.size(); }
  bool empty() const { return obs_.empty(); }
  const MatrixObs& operator[](std::size_t i) const { return obs_[i]; }
  const std::vector<MatrixObs>& obs() const { return obs_; }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }

  /// Appends an observation; validates shape, finiteness and index order.
  void push_back(long t, Mat Y);

  /// Observations [first, last) as a new series with the same manifest.
  MatrixSeries slice(std::size_t first, std::size_t last) const;

 private:
  int p_ = 0;
  int n_ = 0;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
  std::vector<MatrixObs> obs_;
};

/// Known column covariance regime. Prior row scale is Sigma_L / phi.
struct KnownVModel {
  Mat M;
  Mat Sigma_L;
  Mat V;
  double phi = 1.0;

  int p() const { return static_cast<int>(M.rows()); }
  int n() const { return static_cast<int>(M.cols()); }
  void validate() const;
};

/// Normal-inverse-Wishart regime; V ~ IW(Psi, m) in the (m - n - 1)/2
/// exponent convention, k = rho * phi.
struct NIWModel {
  Mat M;
  Mat Sigma_L;
  double phi = 1.0;
  double rho = 1.0;
  Mat Psi;
  double m = 0.0;

  int p() const { return static_cast<int>(M.rows()); }
  int n() const { return static_cast<int>(M.cols()); }
  double k() const { return rho * phi; }
  void validate() const;
};

struct PosteriorKnownV {
  Mat M_star;
  Mat Sigma_star;
  long T = 0;
};

struct PosteriorNIW {
  Mat M_star;
  double k_star = 0.0;
  double m_star = 0.0;
  Mat Psi_star;
  long T = 0;
};

}  // namespace matbf
