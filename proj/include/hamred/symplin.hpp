#pragma once

#include <Eigen/Dense>
#include <optional>

namespace hamred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Default structural tolerance, scaled by max(1, ||A||_F^2) where it applies.
inline constexpr double kSymplecticTol = 1e-10;

// States are ordered y = (q_1..q_n, p_1..p_n) everywhere.

/// Dense canonical Poisson tensor [[0, I_n], [-I_n, 0]].
Matrix poisson_matrix(Index n);

/// J_2n * Y without materializing J (Y has 2n rows).
Matrix apply_poisson(const Matrix& Y);
/// J_2n^T * Y.
Matrix apply_poisson_transpose(const Matrix& Y);
/// X * J_2k (X has 2k columns).
Matrix right_poisson(const Matrix& X);

/// ||A^T J_2n A - J_2k||_max. Throws InvalidDimension for odd shapes.
double symplecticity_residual(const Matrix& A);
/// ||A^T A - I||_max.
double orthonormality_residual(const Matrix& A);

bool is_symplectic(const Matrix& A, double tol);

/// A matrix A (2n x 2k) with A^T J_2n A = J_2k, validated on construction.
/// The orthonormal flag additionally asserts A^T A = I and the block form
/// A = [E, J^T E].
class SymplecticBasis {
 public:
  /// Throws StructureViolation when the claimed structure does not hold to
  /// tol * max(1, ||A||_F^2).
  SymplecticBasis(Matrix A, bool orthonormal, double tol = kSymplecticTol);

  const Matrix& matrix() const { return a_; }
  Index full_dim() const { return a_.rows(); }
  Index half_dim() const { return a_.rows() / 2; }
  Index reduced_dim() const { return a_.cols(); }
  Index half_rank() const { return a_.cols() / 2; }
  bool orthonormal() const { return orthonormal_; }

  /// A_qr, A_qs, A_pr, A_ps blocks of the (q,p) x (r,s) partition.
  Matrix block_qr() const { return a_.topLeftCorner(half_dim(), half_rank()); }
  Matrix block_qs() const { return a_.topRightCorner(half_dim(), half_rank()); }
  Matrix block_pr() const { return a_.bottomLeftCorner(half_dim(), half_rank()); }
  Matrix block_ps() const { return a_.bottomRightCorner(half_dim(), half_rank()); }

 private:
  Matrix a_;
  bool orthonormal_;
};

/// A^+ = J_2k^T A^T J_2n.
Matrix symplectic_inverse(const SymplecticBasis& A);
/// Same, validating that A is symplectic first.
Matrix symplectic_inverse(const Matrix& A, double tol = kSymplecticTol);

/// A A^+ Y.
Matrix symplectic_project(const SymplecticBasis& A, const Matrix& Y);

/// Symplectic Gram-Schmidt (SR) step for ortho-symplectic bases [E, J^T E]:
/// returns a unit vector e with [E, e, J^T E, J^T e] ortho-symplectic and
/// e in span(E, J^T E, v). Two MGS passes. Throws DegenerateCandidate when
/// the residual of v is at most tol.
Vector sr_insert(const Matrix& E, const Vector& v, double tol);

/// Assembles [E, J^T E].
Matrix orthosymplectic_from_half(const Matrix& E);

/// B = S D Q with S symplectic (2n x 2n), Q orthogonal (ns x ns) and D of
/// the block form
///
///        b   q   b   ns-2b-q
///   b  [ Sig 0   0   0 ]
///   q  [ 0   I   0   0 ]
/// n-b-q[ 0   0   0   0 ]
///   b  [ 0   0   Sig 0 ]
///   q  [ 0   0   0   0 ]
/// n-b-q[ 0   0   0   0 ]
struct SvdLikeFactors {
  Matrix S;
  Matrix D;
  Matrix Q;
  Index b = 0;
  Index q = 0;
  Vector sigma;  // symplectic singular values, length b
};

/// tol_rank defaults to 1e-10 * sigma_max(B).
SvdLikeFactors svd_like(const Matrix& B, std::optional<double> tol_rank = std::nullopt);

/// w_i = sigma_i sqrt(|S_i|^2 + |S_{n+i}|^2) for i <= b, |S_i| for the q
/// block. Sum of squares equals ||B||_F^2.
Vector weighted_symplectic_singular_values(const SvdLikeFactors& f);

/// Builds D from (n, ns, b, q, sigma).
Matrix svd_like_middle(Index n, Index ns, Index b, Index q, const Vector& sigma);

}  // namespace hamred
