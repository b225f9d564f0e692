#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hamred/symplin.hpp"

namespace hamred {

enum class ModelKind { Canonical, Dissipative, Noncanonical };

std::string to_string(ModelKind kind);

// Full-order model y' = J grad H(y; mu) (+ X_F for dissipative, J_struct in
// place of J for non-canonical). Implementations are immutable.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;

  virtual std::string name() const = 0;
  virtual ModelKind kind() const = 0;
  virtual Index half_dim() const = 0;
  Index full_dim() const { return 2 * half_dim(); }
  virtual Index param_dim() const { return 1; }

  /// H = T(p) + V(q).
  virtual bool separable() const = 0;
  /// H is a homogeneous quadratic form, so the conservative field is linear.
  virtual bool quadratic() const = 0;

  virtual double hamiltonian(const Vector& y, const Vector& mu) const = 0;
  virtual Vector gradient(const Vector& y, const Vector& mu) const = 0;
  virtual Matrix hessian(const Vector& y, const Vector& mu) const = 0;

  /// Vertical field (0, f_H). Zero unless dissipative.
  virtual Vector dissipation(const Vector& y, const Vector& mu) const;
  /// Jacobian of dissipation() with respect to y.
  virtual Matrix dissipation_jacobian(const Vector& y, const Vector& mu) const;

  /// Constant skew structure matrix; J_2n unless non-canonical.
  virtual Matrix structure() const { return poisson_matrix(half_dim()); }
  /// structure() * g without copying the structure matrix.
  virtual Vector apply_structure(const Vector& g) const { return structure() * g; }

  /// Full vector field and its Jacobian.
  Vector field(const Vector& y, const Vector& mu) const;
  Matrix field_jacobian(const Vector& y, const Vector& mu) const;

  virtual Vector initial_condition(const Vector& mu) const = 0;

  /// Throws InvalidDimension / NonFiniteState on bad (y, mu).
  void check_state(const Vector& y, const Vector& mu) const;
};

struct WaveOptions {
  Index n = 256;
  double width = 0.05;     // Gaussian width of the initial displacement
  double h = 1.0;          // sine-Gordon strength (nonlinear_wave)
  double damping = 0.1;    // c in f_H = -c p (damped_wave)
  std::uint64_t seed = 1;  // congruence K (noncanonical_wave)
};

/// Periodic centered stiffness matrix on n points of [0, 1] with the grid
/// spacing folded in: (L q)_i = (2 q_i - q_{i-1} - q_{i+1}) / dx^2.
Matrix periodic_stiffness(Index n);

/// Registered names: linear_wave, nonlinear_wave, damped_wave, noncanonical_wave.
std::shared_ptr<const HamiltonianModel> build_model(const std::string& name,
                                                   const WaveOptions& opts);

/// K = Q diag(d) with Q orthogonal and d in [0.5, 1.5], drawn from seed.
Matrix seeded_congruence(Index dim, std::uint64_t seed);

}  // namespace hamred
