#pragma once

#include <optional>
#include <vector>

#include "hamred/integrators.hpp"
#include "hamred/models.hpp"
#include "hamred/psd.hpp"
#include "hamred/symplin.hpp"

namespace hamred {

// R(t) = A(t) Z(t) with A ortho-symplectic (2n x 2k) and one column of Z per
// parameter.
struct DlrState {
  Matrix A;
  Matrix Z;
  double t = 0.0;
};

struct CoefficientGram {
  Matrix S;  // Z Z^T + J_2k Z Z^T J_2k^T
  double min_eigenvalue = 0.0;
};

CoefficientGram coefficient_gram(const Matrix& Z);

/// Default rank tolerance 1e-10 * trace(S) / 2k.
double default_rank_tol(const CoefficientGram& g);

/// (I - A A^T)(Y Z^T + J Y Z^T J_2k^T) S^-1 Z + A A^T Y. Throws RankDegeneracy
/// when S is singular to rank_tol (default as above).
Matrix tangent_project(const Matrix& A, const Matrix& Z, const Matrix& Y,
                       std::optional<double> rank_tol = std::nullopt);

struct DlrVelocity {
  Matrix dA;
  Matrix dZ;
};

/// dZ_j = J_2k A^T grad H(A Z_j; mu_j) and
/// dA = (I - A A^T)(Y Z^T + J Y Z^T J_2k^T) S^-1 with Y_j = J grad H(A Z_j; mu_j).
DlrVelocity dlr_velocity(const DlrState& state, const HamiltonianModel& model,
                         const std::vector<Vector>& params);

/// Second-order step: Cayley predictor of A at t + dt/2, implicit midpoint on Z
/// with that basis frozen, then a Cayley retraction of A along dA evaluated at
/// the midpoint state.
DlrState dlr_step(const DlrState& state, const HamiltonianModel& model,
                  const std::vector<Vector>& params, double dt, MidpointOptions opts = {});

/// A0 from the Complex SVD of the initial states, Z0 = A0^T Y0.
DlrState dlr_initial_state(const HamiltonianModel& model, const std::vector<Vector>& params,
                           Index k, ComplexOrder order = ComplexOrder::Paper);

struct DlrRun {
  std::vector<double> times;
  std::vector<DlrState> states;            // saved states
  std::vector<double> symplecticity_drift;  // ||A^T J A - J||_max per saved time
  std::vector<double> orthonormality_drift; // ||A^T A - I||_max per saved time
};

DlrRun dlr_integrate(const DlrState& initial, const HamiltonianModel& model,
                     const std::vector<Vector>& params, const TimeGrid& grid,
                     MidpointOptions opts = {});

}  // namespace hamred
