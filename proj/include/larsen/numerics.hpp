#pragma once

#include "larsen/types.hpp"

namespace larsen {

// Moore-Penrose pseudoinverse via SVD.  Singular values below
// max(rows, cols) * eps * sigma_max are treated as zero, so rank-deficient
// input is fine.  Throws NumericFailure when the SVD does not converge.
Matrix pseudoinverse(const Matrix& m);

// Minimum-norm least squares solution of a * x = b, i.e. pseudoinverse(a) * b.
// b may have several right-hand-side columns.
Matrix lstsq(const Matrix& a, const Matrix& b);

}  // namespace larsen
