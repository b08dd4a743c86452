#include "matbf/linalg.hpp"

#include <cmath>
#include <sstream>

#include "matbf/errors.hpp"

namespace matbf {

namespace {

bool symmetric_within(const Mat& A, double tol) {
  const double scale = A.cwiseAbs().maxCoeff();
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  return asym <= tol * scale;
}

std::string dims(const Mat& A) {
  std::ostringstream os;
  os << A.rows() << "x" << A.cols();
  return os.str();
}

}  // namespace

bool validate_spd(const Mat& A, double tol) {
  require_square(A, "validate_spd input");
  if (A.size() == 0 || !A.allFinite()) return false;
  if (!symmetric_within(A, tol)) return false;
  Eigen::LLT<Mat> llt(symmetrize(A));
  if (llt.info() != Eigen::Success) return false;
  const auto d = llt.matrixLLT().diagonal();
  return (d.array() > 0.0).all() && d.allFinite();
}

SpdFactor::SpdFactor(const Mat& A, const std::string& what) {
  require_square(A, what);
  if (A.size() == 0) throw ShapeError(what + ": empty matrix");
  if (!A.allFinite()) throw CovarianceError(what + ": non-finite entries");
  if (!symmetric_within(A, 1e-8)) throw CovarianceError(what + ": not symmetric");
  llt_.compute(symmetrize(A));
  const auto d = llt_.matrixLLT().diagonal();
  if (llt_.info() != Eigen::Success || !(d.array() > 0.0).all() || !d.allFinite())
    throw CovarianceError(what + ": not positive definite");
  logdet_ = 2.0 * d.array().log().sum();
}

Mat SpdFactor::lower_solve(const Mat& B) const {
  return llt_.matrixL().solve(B);
}

double kron_quad(const SpdFactor& R, const Mat& D, const SpdFactor& C) {
  // ||L_R^{-1} D L_C^{-T}||_F^2
  const Mat A = R.lower_solve(D);
  const Mat B = C.lower_solve(A.transpose());
  return B.squaredNorm();
}

double trace_solve(const SpdFactor& A, const Mat& B) {
  return A.solve(B).trace();
}

Mat symmetrize(const Mat& A) { return 0.5 * (A + A.transpose()); }

void require_square(const Mat& A, const std::string& name) {
  if (A.rows() != A.cols())
    throw ShapeError(name + ": expected a square matrix, got " + dims(A));
}

void require_shape(const Mat& A, Eigen::Index rows, Eigen::Index cols,
                   const std::string& name) {
  if (A.rows() != rows || A.cols() != cols) {
    std::ostringstream os;
    os << name << ": expected " << rows << "x" << cols << ", got " << dims(A);
    throw ShapeError(os.str());
  }
}

void require_finite(const Mat& A, const std::string& name) {
  if (!A.allFinite()) throw InputError(name + ": non-finite entries");
}

}  // namespace matbf
