#include "hamred/integrators.hpp"

#include <cmath>
#include <limits>

#include "hamred/error.hpp"

namespace hamred {

Scheme parse_scheme(const std::string& name) {
  if (name == "midpoint") return Scheme::Midpoint;
  if (name == "stormer_verlet") return Scheme::StormerVerlet;
  throw ConfigError("integrator: unknown scheme '" + name + "'");
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::Midpoint ? "midpoint" : "stormer_verlet";
}

OdeSystem make_system(const HamiltonianModel& model, const Vector& mu) {
  model.check_state(Vector::Zero(model.full_dim()), mu);
  OdeSystem sys;
  sys.dim = model.full_dim();
  sys.field = [&model, mu](const Vector& y) { return model.field(y, mu); };
  sys.jacobian = [&model, mu](const Vector& y) { return model.field_jacobian(y, mu); };
  if (model.quadratic()) sys.linear = model.field_jacobian(Vector::Zero(sys.dim), mu);
  if (model.kind() == ModelKind::Canonical && model.separable()) {
    const Index n = model.half_dim();
    sys.grad_q = [&model, mu, n](const Vector& y) { return Vector(model.gradient(y, mu).head(n)); };
    sys.grad_p = [&model, mu, n](const Vector& y) { return Vector(model.gradient(y, mu).tail(n)); };
  }
  return sys;
}

Vector implicit_midpoint_step(const VectorField& field, const Vector& y, double dt,
                              double newton_tol, int max_iter, const FieldJacobian& jacobian) {
  if (!std::isfinite(dt)) throw StepFailure("implicit_midpoint_step: non-finite dt", dt);
  if (dt == 0.0) return y;
  Vector x = y + dt * field(y);
  bool newton = false;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Vector mid = 0.5 * (y + x);
    const Vector fm = field(mid);
    const Vector r = x - y - dt * fm;
    const double rn = r.norm();
    if (!std::isfinite(rn)) throw StepFailure("implicit_midpoint_step: residual is not finite", rn);
    if (rn <= newton_tol) return x;
    if (!newton && jacobian && it > 0 && rn > 0.5 * last) newton = true;
    if (newton) {
      const Index d = y.size();
      const Matrix G = Matrix::Identity(d, d) - 0.5 * dt * jacobian(mid);
      x -= G.partialPivLu().solve(r);
    } else {
      x = y + dt * fm;
    }
    last = rn;
  }
  const Vector r = x - y - dt * field(0.5 * (y + x));
  if (r.norm() <= newton_tol) return x;
  throw StepFailure("implicit_midpoint_step: no convergence in " + std::to_string(max_iter) +
                        " iterations",
                    r.norm());
}

Vector stormer_verlet_step(const OdeSystem& sys, const Vector& y, double dt) {
  if (!sys.grad_q || !sys.grad_p)
    throw UnsupportedModel("stormer_verlet_step: system is not canonical and separable");
  const Index n = sys.dim / 2;
  Vector out = y;
  out.tail(n) -= 0.5 * dt * sys.grad_q(out);
  out.head(n) += dt * sys.grad_p(out);
  out.tail(n) -= 0.5 * dt * sys.grad_q(out);
  return out;
}

Vector stormer_verlet_step(const HamiltonianModel& model, const Vector& y, double dt,
                           const Vector& mu) {
  if (model.kind() != ModelKind::Canonical || !model.separable())
    throw UnsupportedModel("stormer_verlet_step: " + model.name() +
                           " is not canonical and separable");
  return stormer_verlet_step(make_system(model, mu), y, dt);
}

Stepper::Stepper(OdeSystem sys, Scheme scheme, MidpointOptions opts)
    : sys_(std::move(sys)), scheme_(scheme), opts_(opts) {
  if (scheme_ == Scheme::StormerVerlet && (!sys_.grad_q || !sys_.grad_p))
    throw UnsupportedModel("Stormer-Verlet requires a canonical separable system");
}

Vector Stepper::step(const Vector& y, double dt) {
  if (y.size() != sys_.dim)
    throw InvalidDimension("Stepper: state has length " + std::to_string(y.size()) +
                           ", expected " + std::to_string(sys_.dim));
  if (scheme_ == Scheme::StormerVerlet) return stormer_verlet_step(sys_, y, dt);
  if (sys_.linear) {
    // (I - dt/2 M) y' = (I + dt/2 M) y
    auto it = lu_.find(dt);
    if (it == lu_.end()) {
      const Matrix G = Matrix::Identity(sys_.dim, sys_.dim) - 0.5 * dt * *sys_.linear;
      it = lu_.emplace(dt, G.partialPivLu()).first;
    }
    return it->second.solve(y + 0.5 * dt * (*sys_.linear * y));
  }
  return implicit_midpoint_step(sys_.field, y, dt, opts_.rel_tol * (1.0 + y.norm()),
                                opts_.max_iter, sys_.jacobian);
}

Index TimeGrid::steps() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time.dt must be positive");
  if (!(t_end >= t0)) throw ConfigError("time.t_end must not precede time.t0");
  if (save_every < 1) throw ConfigError("time.save_every must be at least 1");
  const double ratio = (t_end - t0) / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("time: (t_end - t0) / dt is not an integer");
  return static_cast<Index>(rounded);
}

std::vector<double> TimeGrid::saved_times() const {
  const Index n = steps();
  std::vector<double> out;
  for (Index i = 0; i <= n; i += save_every) out.push_back(t0 + static_cast<double>(i) * dt);
  return out;
}

Trajectory integrate(const OdeSystem& sys, const Vector& y0, const TimeGrid& grid, Scheme scheme,
                     MidpointOptions opts) {
  if (y0.size() != sys.dim)
    throw InvalidDimension("integrate: initial state has length " + std::to_string(y0.size()) +
                           ", expected " + std::to_string(sys.dim));
  const Index steps = grid.steps();
  Trajectory traj;
  traj.times = grid.saved_times();
  traj.states.resize(sys.dim, static_cast<Index>(traj.times.size()));
  Stepper stepper(sys, scheme, opts);
  Vector y = y0;
  Index col = 0;
  traj.states.col(col++) = y;
  for (Index i = 1; i <= steps; ++i) {
    y = stepper.step(y, grid.dt);
    if (!y.allFinite())
      throw NonFiniteState("integrate: state became non-finite at t = " +
                           std::to_string(grid.t0 + static_cast<double>(i) * grid.dt));
    if (i % grid.save_every == 0) traj.states.col(col++) = y;
  }
  return traj;
}

Trajectory integrate(const HamiltonianModel& model, const Vector& y0, const Vector& mu,
                     const TimeGrid& grid, Scheme scheme, MidpointOptions opts) {
  if (scheme == Scheme::StormerVerlet &&
      (model.kind() != ModelKind::Canonical || !model.separable()))
    throw UnsupportedModel("integrate: Stormer-Verlet is not compatible with " + model.name());
  model.check_state(y0, mu);
  Trajectory traj = integrate(make_system(model, mu), y0, grid, scheme, opts);
  traj.mu = mu;
  return traj;
}

}  // namespace hamred
