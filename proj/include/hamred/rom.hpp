#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hamred/integrators.hpp"
#include "hamred/models.hpp"
#include "hamred/symplin.hpp"

namespace hamred {

enum class RomKind { Canonical, Dissipative, Noncanonical, PodGalerkin };

// Reduced dynamics z' = G grad H(A z) + P X_F(A z), where
//   canonical:     G = J_2k A^T,  P = 0
//   dissipative:   G = J_2k A^T,  P = A^+
//   non-canonical: G = W U^T with W = U^T J_struct U,  P = 0
//   POD-Galerkin:  G = U^T J_2n (no structure, baseline only).
class ReducedModel {
 public:
  ReducedModel(std::shared_ptr<const HamiltonianModel> model, Matrix basis, Matrix left,
               Matrix dissipation_map, Matrix structure, RomKind kind);

  RomKind kind() const { return kind_; }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }
  /// J_2k, or W for non-canonical reductions (empty for POD-Galerkin).
  const Matrix& structure() const { return structure_; }
  const HamiltonianModel& full_model() const { return *model_; }

  /// H_RB(z) = H(A z).
  double hamiltonian(const Vector& z, const Vector& mu) const;
  /// A^T grad H(A z).
  Vector gradient(const Vector& z, const Vector& mu) const;
  Vector field(const Vector& z, const Vector& mu) const;
  Matrix field_jacobian(const Vector& z, const Vector& mu) const;
  Vector reconstruct(const Vector& z) const { return basis_ * z; }

  /// The reduced system at fixed mu; this object must outlive it.
  OdeSystem system(const Vector& mu) const;

 private:
  std::shared_ptr<const HamiltonianModel> model_;
  Matrix basis_;
  Matrix left_;
  Matrix dissipation_map_;
  Matrix structure_;
  RomKind kind_;
  bool block_diagonal_ = false;
};

/// Symplectic Galerkin projection of a canonical model.
ReducedModel galerkin_reduce(std::shared_ptr<const HamiltonianModel> model,
                             const SymplecticBasis& A);

/// Projection of a dissipative model. With require_vertical, throws
/// StructureViolation unless ||A_qs||_max <= 1e-10, so that A^+ X_F stays
/// vertical.
ReducedModel dissipative_reduce(std::shared_ptr<const HamiltonianModel> model,
                                const SymplecticBasis& A, bool require_vertical = true);

/// Orthonormal Galerkin projection preserving a constant skew structure.
ReducedModel noncanonical_reduce(std::shared_ptr<const HamiltonianModel> model, const Matrix& U);

/// Plain orthogonal Galerkin projection z' = U^T f(U z) of a canonical model.
ReducedModel pod_galerkin_reduce(std::shared_ptr<const HamiltonianModel> model, const Matrix& U);

/// z0 = A^+ y0.
Vector reduced_initial_condition(const SymplecticBasis& A, const Vector& y0);

Trajectory simulate_rom(const ReducedModel& rm, const Vector& z0, const Vector& mu,
                        const TimeGrid& grid, Scheme scheme, MidpointOptions opts = {});

struct DiagnosticsRecord {
  std::vector<double> times;
  std::vector<double> state_error;
  std::vector<double> hamiltonian_fom;
  std::vector<double> hamiltonian_rom;
  std::vector<double> hamiltonian_gap;

  double max_state_error() const;
  /// max_t |gap(t) - gap(0)|.
  double max_gap_deviation() const;
  /// max_t |H_rom(t) - H_rom(0)|.
  double max_rom_energy_drift() const;
};

DiagnosticsRecord diagnostics(const Trajectory& fom, const Trajectory& rom,
                              const ReducedModel& rm);

/// Columns t,state_err,H_fom,H_rom,H_gap with 17 significant digits.
void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& rec);

}  // namespace hamred
