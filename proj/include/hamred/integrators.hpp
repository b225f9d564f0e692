#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "hamred/models.hpp"

namespace hamred {

enum class Scheme { Midpoint, StormerVerlet };

/// "midpoint" or "stormer_verlet"; anything else is a ConfigError.
Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

using VectorField = std::function<Vector(const Vector&)>;
using FieldJacobian = std::function<Matrix(const Vector&)>;

// Autonomous system y' = f(y) as seen by the integrators. Full and reduced
// models both lower to this.
struct OdeSystem {
  Index dim = 0;
  VectorField field;
  FieldJacobian jacobian;        // optional, enables Newton
  std::optional<Matrix> linear;  // set when f(y) = M y
  // Canonical separable split for Stormer-Verlet: dV/dq and dT/dp, each
  // taking the full state and returning a half-length vector.
  VectorField grad_q;
  VectorField grad_p;
};

/// Lowers a model at fixed parameter mu. The model must outlive the system.
OdeSystem make_system(const HamiltonianModel& model, const Vector& mu);

struct MidpointOptions {
  double rel_tol = 1e-12;  // residual tolerance is rel_tol * (1 + ||y||)
  int max_iter = 50;
};

/// Solves y' = y + dt f((y + y') / 2) to residual newton_tol. Fixed-point
/// iteration, switching to Newton when jacobian is given and the fixed point
/// stops contracting. Throws StepFailure after max_iter iterations.
Vector implicit_midpoint_step(const VectorField& field, const Vector& y, double dt,
                              double newton_tol, int max_iter,
                              const FieldJacobian& jacobian = {});

/// Kick-drift-kick. Throws UnsupportedModel unless the model is canonical and
/// separable.
Vector stormer_verlet_step(const HamiltonianModel& model, const Vector& y, double dt,
                           const Vector& mu);
Vector stormer_verlet_step(const OdeSystem& sys, const Vector& y, double dt);

// One-step map with per-dt caching of the midpoint factorization for linear
// systems.
class Stepper {
 public:
  Stepper(OdeSystem sys, Scheme scheme, MidpointOptions opts = {});
  Vector step(const Vector& y, double dt);
  const OdeSystem& system() const { return sys_; }

 private:
  OdeSystem sys_;
  Scheme scheme_;
  MidpointOptions opts_;
  std::map<double, Eigen::PartialPivLU<Matrix>> lu_;
};

// Uniform grid t_i = t0 + i dt, i = 0..steps; every save_every-th state is
// stored (the initial state always).
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  Index save_every = 1;

  /// Throws ConfigError unless dt > 0, t_end >= t0 and (t_end - t0) / dt is an
  /// integer to 1e-9 relative.
  Index steps() const;
  std::vector<double> saved_times() const;
};

struct Trajectory {
  std::vector<double> times;
  Matrix states;  // one column per time
  Vector mu;
};

Trajectory integrate(const OdeSystem& sys, const Vector& y0, const TimeGrid& grid, Scheme scheme,
                     MidpointOptions opts = {});
/// Checks scheme/kind compatibility: Stormer-Verlet needs a canonical
/// separable model.
Trajectory integrate(const HamiltonianModel& model, const Vector& y0, const Vector& mu,
                     const TimeGrid& grid, Scheme scheme, MidpointOptions opts = {});

}  // namespace hamred
