#include "cenn/constraints.hpp"

#include <Eigen/SVD>

namespace cenn {

namespace {

/// Makes the largest-magnitude entry of each column positive so output is reproducible.
void fix_signs(Matrix& basis) {
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    Eigen::Index arg = 0;
    basis.col(k).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, k) < 0.0) basis.col(k) *= -1.0;
  }
}

}  // namespace

Matrix nullspace(const Matrix& a, double tol, std::vector<double>* singular_values, std::size_t* rank) {
  const Eigen::Index n = a.cols();
  if (singular_values) singular_values->clear();
  if (rank) *rank = 0;
  if (n == 0) return Matrix(0, 0);
  if (a.rows() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return Matrix::Identity(n, n);

  // Tall systems are first compressed to an n×n triangular factor: A P = Q R, so
  // ker A = ker(R Pᵀ).
  Matrix reduced;
  if (a.rows() > n) {
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    reduced = r * qr.colsPermutation().transpose();
  } else {
    // Wide input is padded with zero rows: BDCSVD's full V is unreliable for wide matrices.
    reduced = Matrix::Zero(n, n);
    reduced.topRows(a.rows()) = a;
  }

  Eigen::BDCSVD<Matrix> svd(reduced, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * (sv.size() ? sv(0) : 0.0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (singular_values) singular_values->push_back(sv(i));
    if (sv(i) > cutoff) ++r;
  }
  if (rank) *rank = r;
  Matrix basis = svd.matrixV().rightCols(n - Eigen::Index(r));
  fix_signs(basis);
  return basis;
}

}  // namespace cenn
