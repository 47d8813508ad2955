#include "larsen/numerics.hpp"

#include <Eigen/SVD>

#include <limits>
#include <string>

namespace larsen {

Matrix pseudoinverse(const Matrix& m) {
  require_finite(m, "pseudoinverse");
  if (m.rows() == 0 || m.cols() == 0) {
    throw ContractViolation("pseudoinverse: empty matrix");
  }

  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericFailure("pseudoinverse: SVD failed to converge on a " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                         " matrix");
  }

  const Vector& sv = svd.singularValues();
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol =
      static_cast<double>(std::max(m.rows(), m.cols())) * eps * (sv.size() > 0 ? sv(0) : 0.0);

  Vector inv_sv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) {
      inv_sv(i) = 1.0 / sv(i);
    }
  }

  Matrix result = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  if (!result.allFinite()) {
    throw NumericFailure("pseudoinverse: non-finite result");
  }
  return result;
}

Matrix lstsq(const Matrix& a, const Matrix& b) {
  require_finite(a, "lstsq");
  require_finite(b, "lstsq");
  if (a.rows() != b.rows()) {
    throw ContractViolation("lstsq: a has " + std::to_string(a.rows()) +
                            " rows but b has " + std::to_string(b.rows()));
  }
  return pseudoinverse(a) * b;
}

}  // namespace larsen
