#include "hamred/symplin.hpp"

#include <algorithm>
#include <string>

#include "hamred/error.hpp"

namespace hamred {

namespace {

void require_even_rows(const Matrix& Y, const char* what) {
  if (Y.rows() % 2 != 0)
    throw InvalidDimension(std::string(what) + ": row count " + std::to_string(Y.rows()) +
                           " is odd");
}

double structural_scale(const Matrix& A) { return std::max(1.0, A.squaredNorm()); }

}  // namespace

Matrix poisson_matrix(Index n) {
  if (n < 1) throw InvalidDimension("poisson_matrix: half-dimension must be positive");
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return J;
}

Matrix apply_poisson(const Matrix& Y) {
  require_even_rows(Y, "apply_poisson");
  const Index n = Y.rows() / 2;
  Matrix out(Y.rows(), Y.cols());
  out.topRows(n) = Y.bottomRows(n);
  out.bottomRows(n) = -Y.topRows(n);
  return out;
}

Matrix apply_poisson_transpose(const Matrix& Y) {
  require_even_rows(Y, "apply_poisson_transpose");
  const Index n = Y.rows() / 2;
  Matrix out(Y.rows(), Y.cols());
  out.topRows(n) = -Y.bottomRows(n);
  out.bottomRows(n) = Y.topRows(n);
  return out;
}

Matrix right_poisson(const Matrix& X) {
  if (X.cols() % 2 != 0) throw InvalidDimension("right_poisson: column count is odd");
  const Index k = X.cols() / 2;
  Matrix out(X.rows(), X.cols());
  out.leftCols(k) = -X.rightCols(k);
  out.rightCols(k) = X.leftCols(k);
  return out;
}

double symplecticity_residual(const Matrix& A) {
  require_even_rows(A, "is_symplectic");
  if (A.cols() % 2 != 0 || A.cols() == 0)
    throw InvalidDimension("is_symplectic: column count must be even and positive");
  const Matrix form = A.transpose() * apply_poisson(A);
  return (form - poisson_matrix(A.cols() / 2)).cwiseAbs().maxCoeff();
}

double orthonormality_residual(const Matrix& A) {
  if (A.cols() == 0) return 0.0;
  const Matrix gram = A.transpose() * A;
  return (gram - Matrix::Identity(A.cols(), A.cols())).cwiseAbs().maxCoeff();
}

bool is_symplectic(const Matrix& A, double tol) { return symplecticity_residual(A) <= tol; }

SymplecticBasis::SymplecticBasis(Matrix A, bool orthonormal, double tol)
    : a_(std::move(A)), orthonormal_(orthonormal) {
  if (a_.cols() > a_.rows())
    throw InvalidDimension("SymplecticBasis: more columns than rows");
  const double scale = structural_scale(a_);
  const double sres = symplecticity_residual(a_);
  if (sres > tol * scale)
    throw StructureViolation("SymplecticBasis: ||A^T J A - J||_max = " + std::to_string(sres));
  if (orthonormal_) {
    const double ores = orthonormality_residual(a_);
    if (ores > tol * scale)
      throw StructureViolation("SymplecticBasis: ||A^T A - I||_max = " + std::to_string(ores));
    const Index k = half_rank();
    const double blk =
        (a_.rightCols(k) - apply_poisson_transpose(a_.leftCols(k))).cwiseAbs().maxCoeff();
    if (blk > tol * scale)
      throw StructureViolation("SymplecticBasis: columns are not of the form [E, J^T E]");
  }
}

Matrix symplectic_inverse(const SymplecticBasis& A) {
  // J_2k^T A^T J_2n = (J_2n^T A J_2k)^T
  return right_poisson(apply_poisson_transpose(A.matrix())).transpose();
}

Matrix symplectic_inverse(const Matrix& A, double tol) {
  return symplectic_inverse(SymplecticBasis(A, false, tol));
}

Matrix symplectic_project(const SymplecticBasis& A, const Matrix& Y) {
  if (Y.rows() != A.full_dim())
    throw InvalidDimension("symplectic_project: Y has " + std::to_string(Y.rows()) +
                           " rows, basis has " + std::to_string(A.full_dim()));
  return A.matrix() * (symplectic_inverse(A) * Y);
}

Matrix orthosymplectic_from_half(const Matrix& E) {
  Matrix A(E.rows(), 2 * E.cols());
  A << E, apply_poisson_transpose(E);
  return A;
}

Vector sr_insert(const Matrix& E, const Vector& v, double tol) {
  require_even_rows(v, "sr_insert");
  if (E.cols() > 0 && E.rows() != v.size())
    throw InvalidDimension("sr_insert: E and v row counts differ");
  const Matrix span = orthosymplectic_from_half(E.cols() > 0 ? E : Matrix(v.size(), 0));
  Vector w = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < span.cols(); ++j) w -= span.col(j).dot(w) * span.col(j);
  }
  const double norm = w.norm();
  if (norm <= tol)
    throw DegenerateCandidate("sr_insert: candidate residual " + std::to_string(norm) +
                              " is below tolerance");
  return w / norm;
}

}  // namespace hamred
