#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hamred/integrators.hpp"
#include "hamred/models.hpp"
#include "hamred/symplin.hpp"

namespace hamred {

struct SnapshotMatrix {
  Matrix data;  // 2n x N
  std::vector<std::pair<Vector, double>> provenance;  // (mu_j, t_i) per column
};

struct ParameterSet {
  std::vector<Vector> samples;
  TimeGrid grid;
};

/// Columns ordered parameters outer, time inner. Parameters run in parallel;
/// the result does not depend on the thread count.
SnapshotMatrix assemble_snapshots(const HamiltonianModel& model, const ParameterSet& params,
                                  Scheme scheme);

struct BasisReport {
  Matrix basis;  // 2n x 2k
  std::string method;
  double projection_error = 0.0;  // ||M - A A^+ M||_F
  Vector spectrum;                // singular values or weighted symplectic values
  std::vector<std::string> warnings;
};

/// ||M - A A^+ M||_F.
double symplectic_projection_error(const Matrix& A, const Matrix& M);

/// A = diag(Phi, Phi) from the SVD of [q_1..q_N p_1..p_N]. Pads Phi from the
/// orthogonal complement when M_1 has fewer than k significant directions.
BasisReport cotangent_lift(const Matrix& M, Index k);

enum class ComplexOrder { Paper, Qp };
ComplexOrder parse_complex_order(const std::string& s);

/// Ortho-symplectic basis from the k dominant left singular vectors of the
/// complex snapshot matrix. Paper order uses p + i q, Qp order uses q + i p;
/// both give the same optimal subspace.
BasisReport complex_svd_basis(const Matrix& M, Index k, ComplexOrder order = ComplexOrder::Paper);

/// Pairs of columns of S from the SVD-like decomposition with the k largest
/// weighted symplectic singular values. Throws InsufficientRank if k > b + q.
BasisReport psd_svd_like_basis(const Matrix& M, Index k);

/// Top m left singular vectors (not symplectic).
Matrix pod_basis(const Matrix& M, Index m);

enum class GreedyIndicator { Hamiltonian, Projection };
GreedyIndicator parse_indicator(const std::string& s);

struct GreedyOptions {
  Index k_max = 10;
  double tol = 1e-10;
  GreedyIndicator indicator = GreedyIndicator::Projection;
  Scheme scheme = Scheme::Midpoint;
};

struct GreedyResult {
  BasisReport report;
  // Projection error ||M - A A^T M||_F over all training snapshots for the
  // basis with i + 1 pairs.
  std::vector<double> error_history;
  std::vector<double> indicator_history;
  std::string status;  // "converged", "k_max" or "saturated"
};

/// Greedy symplectic reduced basis with SR expansion. Full-model trajectories
/// are cached per parameter.
GreedyResult greedy_symplectic_basis(const HamiltonianModel& model, const ParameterSet& params,
                                     const GreedyOptions& opts);

}  // namespace hamred
