#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <string>

namespace matbf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// True iff A is symmetric within tol * max|A| and its Cholesky factorization
/// succeeds. Throws ShapeError for non-square input.
bool validate_spd(const Mat& A, double tol = 1e-8);

/// Cholesky factor of an SPD matrix. All solves are triangular; no inverse is
/// ever formed.
class SpdFactor {
 public:
  SpdFactor() = default;
  /// Throws CovarianceError naming `what` when A is not SPD.
  SpdFactor(const Mat& A, const std::string& what);

  Eigen::Index dim() const { return llt_.rows(); }
  double logdet() const { return logdet_; }
  Mat matrixL() const { return llt_.matrixL(); }
  /// A^{-1} B.
  Mat solve(const Mat& B) const { return llt_.solve(B); }
  /// L^{-1} B.
  Mat lower_solve(const Mat& B) const;

 private:
  Eigen::LLT<Mat> llt_;
  double logdet_ = 0.0;
};

/// tr[R^{-1} D C^{-1} D'] for SPD R (p x p), C (n x n) and D (p x n).
double kron_quad(const SpdFactor& R, const Mat& D, const SpdFactor& C);

/// tr[A^{-1} B] for SPD A.
double trace_solve(const SpdFactor& A, const Mat& B);

Mat symmetrize(const Mat& A);

void require_square(const Mat& A, const std::string& name);
void require_shape(const Mat& A, Eigen::Index rows, Eigen::Index cols,
                   const std::string& name);
void require_finite(const Mat& A, const std::string& name);

}  // namespace matbf
