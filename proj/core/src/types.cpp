#include "matbf/types.hpp"

#include <sstream>

#include "matbf/errors.hpp"

namespace matbf {

MatrixSeries::MatrixSeries(int p, int n, std::vector<std::string> row_labels,
                           std::vector<std::string> col_labels)
    : p_(p), n_(n), row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
  if (p < 1 || n < 1) throw ShapeError("series shape must satisfy p >= 1, n >= 1");
  if (!row_labels_.empty() && static_cast<int>(row_labels_.size()) != p)
    throw ShapeError("row_labels length differs from p");
  if (!col_labels_.empty() && static_cast<int>(col_labels_.size()) != n)
    throw ShapeError("col_labels length differs from n");
}

void MatrixSeries::push_back(long t, Mat Y) {
  require_shape(Y, p_, n_, "observation at t=" + std::to_string(t));
  if (!Y.allFinite())
    throw InputError("observation at t=" + std::to_string(t) + " has non-finite entries");
  if (!obs_.empty() && t <= obs_.back().t) {
    std::ostringstream os;
    os << "time indices must be strictly increasing: " << t << " after "
       << obs_.back().t;
    throw InputError(os.str());
  }
  obs_.push_back({t, std::move(Y)});
}

MatrixSeries MatrixSeries::slice(std::size_t first, std::size_t last) const {
  if (first > last || last > obs_.size()) throw ShapeError("slice out of range");
  MatrixSeries out(p_, n_, row_labels_, col_labels_);
  out.obs_.assign(obs_.begin() + static_cast<long>(first),
                  obs_.begin() + static_cast<long>(last));
  return out;
}

void KnownVModel::validate() const {
  const auto p = M.rows(), n = M.cols();
  if (p < 1 || n < 1) throw ShapeError("KnownVModel: empty prior mean");
  require_shape(Sigma_L, p, p, "KnownVModel.Sigma_L");
  require_shape(V, n, n, "KnownVModel.V");
  if (!(phi > 0.0)) throw DomainError("KnownVModel: phi must be positive");
  if (!validate_spd(Sigma_L)) throw CovarianceError("KnownVModel.Sigma_L is not SPD");
  if (!validate_spd(V)) throw CovarianceError("KnownVModel.V is not SPD");
}

void NIWModel::validate() const {
  const auto p = M.rows(), n = M.cols();
  if (p < 1 || n < 1) throw ShapeError("NIWModel: empty prior mean");
  require_shape(Sigma_L, p, p, "NIWModel.Sigma_L");
  require_shape(Psi, n, n, "NIWModel.Psi");
  if (!(phi > 0.0) || !(rho > 0.0)) throw DomainError("NIWModel: k = rho*phi must be positive");
  if (!(m > 2.0 * static_cast<double>(n)))
    throw DomainError("NIWModel: degrees of freedom must satisfy m > 2n");
  if (!validate_spd(Sigma_L)) throw CovarianceError("NIWModel.Sigma_L is not SPD");
  if (!validate_spd(Psi)) throw CovarianceError("NIWModel.Psi is not SPD");
}

}  // namespace matbf
