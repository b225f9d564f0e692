#include "hamred/dlr.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>

#include "hamred/error.hpp"
#include "hamred/io.hpp"
#include "hamred/parallel.hpp"

namespace hamred {

namespace {

void check_state(const DlrState& s, const HamiltonianModel& model,
                 const std::vector<Vector>& params) {
  if (model.kind() != ModelKind::Canonical)
    throw UnsupportedModel("dlr: " + model.name() + " is not a canonical Hamiltonian model");
  if (s.A.rows() != model.full_dim() || s.A.cols() % 2 != 0 || s.A.cols() == 0)
    throw InvalidDimension("dlr: basis must be 2n x 2k with 2n the model dimension");
  if (s.Z.rows() != s.A.cols())
    throw InvalidDimension("dlr: coefficient rows do not match the basis width");
  if (s.Z.cols() != static_cast<Index>(params.size()))
    throw InvalidDimension("dlr: one coefficient column per parameter is required");
}

// (Y Z^T + J Y Z^T J_2k^T) S^-1 before the (I - A A^T) factor.
Matrix tangent_core(const Matrix& Z, const Matrix& Y, std::optional<double> rank_tol) {
  const CoefficientGram g = coefficient_gram(Z);
  const double tol = rank_tol.value_or(default_rank_tol(g));
  if (!(g.min_eigenvalue > tol))
    throw RankDegeneracy("dlr: coefficient Gram matrix is singular (smallest eigenvalue " +
                         format_double(g.min_eigenvalue) + " <= " + format_double(tol) +
                         "); lower k or perturb Z");
  const Matrix YZ = Y * Z.transpose();
  // J Y Z^T J_2k^T = -J (Y Z^T J_2k)
  const Matrix M = YZ - apply_poisson(right_poisson(YZ));
  return g.S.llt().solve(M.transpose()).transpose();
}

Matrix horizontal(const Matrix& A, const Matrix& X) { return X - A * (A.transpose() * X); }

// Columns grad H(A Z_j; mu_j).
Matrix lifted_gradients(const Matrix& A, const Matrix& Z, const HamiltonianModel& model,
                        const std::vector<Vector>& params) {
  Matrix G(A.rows(), Z.cols());
  for (Index j = 0; j < Z.cols(); ++j)
    G.col(j) = model.gradient(A * Z.col(j), params[static_cast<std::size_t>(j)]);
  return G;
}

}  // namespace

CoefficientGram coefficient_gram(const Matrix& Z) {
  if (Z.rows() % 2 != 0) throw InvalidDimension("coefficient_gram: Z must have 2k rows");
  CoefficientGram g;
  const Matrix ZZ = Z * Z.transpose();
  // J ZZ^T J^T = -(J ZZ^T) J
  g.S = ZZ - right_poisson(apply_poisson(ZZ));
  g.S = (0.5 * (g.S + g.S.transpose())).eval();
  if (g.S.size() == 0) return g;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.S, Eigen::EigenvaluesOnly);
  g.min_eigenvalue = es.eigenvalues()(0);
  return g;
}

double default_rank_tol(const CoefficientGram& g) {
  return g.S.rows() ? 1e-10 * g.S.trace() / static_cast<double>(g.S.rows()) : 0.0;
}

Matrix tangent_project(const Matrix& A, const Matrix& Z, const Matrix& Y,
                       std::optional<double> rank_tol) {
  if (Y.rows() != A.rows() || Y.cols() != Z.cols() || Z.rows() != A.cols())
    throw InvalidDimension("tangent_project: shapes of A, Z and Y do not agree");
  return horizontal(A, tangent_core(Z, Y, rank_tol)) * Z + A * (A.transpose() * Y);
}

DlrVelocity dlr_velocity(const DlrState& state, const HamiltonianModel& model,
                         const std::vector<Vector>& params) {
  check_state(state, model, params);
  const Matrix G = lifted_gradients(state.A, state.Z, model, params);
  DlrVelocity v;
  v.dZ = apply_poisson(Matrix(state.A.transpose() * G));
  v.dA = horizontal(state.A, tangent_core(state.Z, apply_poisson(G), std::nullopt));
  return v;
}

namespace {

// Implicit midpoint on z_j' = J_2k A^T grad H(A z_j; mu_j) with A frozen.
Matrix z_substep(const Matrix& A, const Matrix& Z, const HamiltonianModel& model,
                 const std::vector<Vector>& params, double dt, const MidpointOptions& opts) {
  const Index k2 = A.cols();
  Matrix Znew(Z.rows(), Z.cols());
  parallel_for(params.size(), [&](std::size_t j) {
    const Vector& mu = params[j];
    const Index c = static_cast<Index>(j);
    if (model.quadratic()) {
      // Homogeneous quadratic H: the reduced field is z -> J_2k A^T G z with
      // G = [grad H(A e_1), ..., grad H(A e_2k)].
      Matrix G(A.rows(), k2);
      for (Index i = 0; i < k2; ++i) G.col(i) = model.gradient(A.col(i), mu);
      const Matrix M = apply_poisson(Matrix(A.transpose() * G));
      const Matrix I = Matrix::Identity(k2, k2);
      Znew.col(c) = (I - 0.5 * dt * M).partialPivLu().solve(Z.col(c) + 0.5 * dt * (M * Z.col(c)));
    } else {
      auto field = [&](const Vector& z) {
        return Vector(apply_poisson(Matrix(A.transpose() * model.gradient(A * z, mu))));
      };
      auto jac = [&](const Vector& z) {
        return Matrix(apply_poisson(Matrix(A.transpose() * (model.hessian(A * z, mu) * A))));
      };
      const Vector& z = Z.col(c);
      Znew.col(c) =
          implicit_midpoint_step(field, z, dt, opts.rel_tol * (1.0 + z.norm()), opts.max_iter, jac);
    }
  });
  return Znew;
}

// Horizontal basis velocity at (A, Z).
Matrix basis_velocity(const Matrix& A, const Matrix& Z, const HamiltonianModel& model,
                      const std::vector<Vector>& params) {
  const Matrix Y = apply_poisson(lifted_gradients(A, Z, model, params));
  return horizontal(A, tangent_core(Z, Y, std::nullopt));
}

// cay(dt Omega) A for the generator Omega = V A^T - A V^T with V horizontal,
// applied through Woodbury with U = [V, A], W = [A, -V] so only a 4k x 4k
// solve is needed.
Matrix cayley(const Matrix& A, const Matrix& V, double dt) {
  const Index k2 = A.cols();
  const double alpha = 0.5 * dt;
  Matrix U(A.rows(), 2 * k2), W(A.rows(), 2 * k2);
  U << V, A;
  W << A, -V;
  const Matrix X = A + alpha * V;
  const Matrix small = Matrix::Identity(2 * k2, 2 * k2) - alpha * (W.transpose() * U);
  return X + alpha * U * small.partialPivLu().solve(W.transpose() * X);
}

}  // namespace

DlrState dlr_step(const DlrState& state, const HamiltonianModel& model,
                  const std::vector<Vector>& params, double dt, MidpointOptions opts) {
  check_state(state, model, params);
  if (dt == 0.0) return state;
  const Matrix& A = state.A;

  // Midpoint-type coupling: predict the basis at t + dt/2, advance Z with the
  // basis frozen there, then retract A along the velocity at the midpoint
  // state. Both fields are sampled at the midpoint, so the step is second
  // order.
  const Matrix Ahalf = cayley(A, basis_velocity(A, state.Z, model, params), 0.5 * dt);
  Matrix Znew = z_substep(Ahalf, state.Z, model, params, dt, opts);
  const Matrix Zmid = 0.5 * (state.Z + Znew);
  const Matrix V = horizontal(A, basis_velocity(Ahalf, Zmid, model, params));

  DlrState out;
  out.A = cayley(A, V, dt);
  out.Z = std::move(Znew);
  out.t = state.t + dt;
  if (!out.A.allFinite() || !out.Z.allFinite())
    throw NonFiniteState("dlr_step: state became non-finite");
  return out;
}

DlrState dlr_initial_state(const HamiltonianModel& model, const std::vector<Vector>& params,
                           Index k, ComplexOrder order) {
  if (params.empty()) throw ConfigError("dlr: parameter sample set is empty");
  Matrix Y0(model.full_dim(), static_cast<Index>(params.size()));
  for (std::size_t j = 0; j < params.size(); ++j)
    Y0.col(static_cast<Index>(j)) = model.initial_condition(params[j]);
  DlrState s;
  s.A = complex_svd_basis(Y0, k, order).basis;
  s.Z = s.A.transpose() * Y0;
  return s;
}

DlrRun dlr_integrate(const DlrState& initial, const HamiltonianModel& model,
                     const std::vector<Vector>& params, const TimeGrid& grid,
                     MidpointOptions opts) {
  check_state(initial, model, params);
  SymplecticBasis(initial.A, true, 1e-8);  // throws unless ortho-symplectic
  const Index steps = grid.steps();
  DlrRun run;
  DlrState s = initial;
  s.t = grid.t0;
  auto record = [&](const DlrState& st) {
    run.times.push_back(st.t);
    run.states.push_back(st);
    run.symplecticity_drift.push_back(symplecticity_residual(st.A));
    run.orthonormality_drift.push_back(orthonormality_residual(st.A));
  };
  record(s);
  for (Index i = 1; i <= steps; ++i) {
    s = dlr_step(s, model, params, grid.dt, opts);
    s.t = grid.t0 + static_cast<double>(i) * grid.dt;
    if (i % grid.save_every == 0) record(s);
  }
  return run;
}

}  // namespace hamred
