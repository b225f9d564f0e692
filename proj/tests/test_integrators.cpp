#include <gtest/gtest.h>

#include <cmath>

#include "hamred/error.hpp"
#include "hamred/integrators.hpp"
#include "test_support.hpp"

using namespace hamred;
using namespace hamred::testing;

namespace {

const double kPi = 3.14159265358979323846;

// H = (q^2 + p^2) / 2 in one degree of freedom.
OdeSystem oscillator() {
  OdeSystem s;
  s.dim = 2;
  s.field = [](const Vector& y) { return Vector((Vector(2) << y(1), -y(0)).finished()); };
  s.jacobian = [](const Vector&) { return Matrix((Matrix(2, 2) << 0, 1, -1, 0).finished()); };
  s.grad_q = [](const Vector& y) { return Vector(y.head(1)); };
  s.grad_p = [](const Vector& y) { return Vector(y.tail(1)); };
  return s;
}

double osc_energy(const Vector& y) { return 0.5 * y.squaredNorm(); }

WaveOptions wave(Index n) {
  WaveOptions o;
  o.n = n;
  o.width = 0.15;
  o.damping = 0.5;
  return o;
}

}  // namespace

TEST(Midpoint, ZeroFieldIsIdentity) {
  const Vector y = Vector::LinSpaced(4, 1, 4);
  auto zero = [](const Vector& v) { return Vector(Vector::Zero(v.size())); };
  EXPECT_EQ(implicit_midpoint_step(zero, y, 0.1, 1e-12, 50), y);
}

TEST(Midpoint, OscillatorConservesEnergy) {
  Vector y(2);
  y << 1, 0;
  const Vector y1 = implicit_midpoint_step(oscillator().field, y, 0.1, 1e-14, 100);
  EXPECT_NEAR(osc_energy(y1), osc_energy(y), 1e-12);
}

TEST(Midpoint, LinearFieldMatchesCayleyForm) {
  CounterRng rng(21);
  const Matrix M = rng.normal_matrix(6, 6);
  const Vector y = rng.normal_matrix(6, 1);
  const double dt = 0.05;
  auto f = [&](const Vector& v) { return Vector(M * v); };
  const Matrix I = Matrix::Identity(6, 6);
  const Vector expected = (I - 0.5 * dt * M).fullPivLu().solve((I + 0.5 * dt * M) * y);
  const Vector fixed_point = implicit_midpoint_step(f, y, dt, 1e-14, 200);
  EXPECT_LE((fixed_point - expected).norm(), 1e-12 * (1 + y.norm()));
  auto jac = [&](const Vector&) { return M; };
  EXPECT_LE((implicit_midpoint_step(f, y, dt, 1e-14, 50, jac) - expected).norm(), 1e-12 * (1 + y.norm()));
}

TEST(Midpoint, NonConvergenceReportsResidual) {
  auto stiff = [](const Vector& v) { return Vector(1e4 * v); };
  try {
    implicit_midpoint_step(stiff, Vector::Ones(2), 1.0, 1e-14, 5);
    FAIL() << "expected StepFailure";
  } catch (const StepFailure& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Midpoint, StepIsReversible) {
  CounterRng rng(22);
  const OdeSystem s = pendulum_chain(3);
  const Vector y = rng.normal_matrix(6, 1);
  const Vector fwd = implicit_midpoint_step(s.field, y, 0.05, 1e-14, 100);
  const Vector back = implicit_midpoint_step(s.field, fwd, -0.05, 1e-14, 100);
  EXPECT_LE((back - y).norm(), 1e-9);
}

TEST(Midpoint, DiscreteFlowIsSymplectic) {
  CounterRng rng(23);
  for (Index n : {1, 2, 3, 4}) {
    const OdeSystem s = pendulum_chain(n);
    const Vector y = rng.normal_matrix(2 * n, 1);
    const Matrix Phi = midpoint_step_jacobian(s, y, 0.1);
    EXPECT_LE((Phi.transpose() * dense_j(n) * Phi - dense_j(n)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(StormerVerlet, FreeDrift) {
  OdeSystem s = oscillator();
  s.grad_q = [](const Vector&) { return Vector(Vector::Zero(1)); };
  Vector y(2);
  y << 0.5, 2.0;
  const Vector y1 = stormer_verlet_step(s, y, 0.25);
  EXPECT_DOUBLE_EQ(y1(0), 1.0);
  EXPECT_DOUBLE_EQ(y1(1), 2.0);
}

TEST(StormerVerlet, OnePeriodSecondOrder) {
  const OdeSystem s = oscillator();
  double prev = 0.0;
  for (int steps : {500, 1000}) {
    Vector y(2);
    y << 1, 0;
    const double dt = 2 * kPi / steps;
    for (int i = 0; i < steps; ++i) y = stormer_verlet_step(s, y, dt);
    const double err = (y - Vector::Unit(2, 0)).norm();
    EXPECT_LE(err, 2.0 * dt * dt);
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.2);
    prev = err;
  }
}

TEST(StormerVerlet, LongRunEnergyBounded) {
  const OdeSystem s = oscillator();
  Vector y(2);
  y << 1, 0;
  const double dt = 1e-3;
  double drift = 0.0;
  for (int i = 0; i < 100000; ++i) {
    y = stormer_verlet_step(s, y, dt);
    drift = std::max(drift, std::abs(osc_energy(y) - 0.5));
  }
  EXPECT_LE(drift / 0.5, 1e-6);
}

TEST(StormerVerlet, RejectsNonSeparableOrNonCanonical) {
  OdeSystem s = oscillator();
  s.grad_q = nullptr;
  EXPECT_THROW(stormer_verlet_step(s, Vector::Ones(2), 0.1), UnsupportedModel);
  const auto damped = build_model("damped_wave", wave(8));
  EXPECT_THROW(stormer_verlet_step(*damped, Vector::Ones(16), 0.1, Vector::Ones(1)),
               UnsupportedModel);
}

TEST(TimeGridTest, Validation) {
  TimeGrid g{0.0, 1.0, 0.25, 2};
  EXPECT_EQ(g.steps(), 4);
  EXPECT_EQ(g.saved_times(), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_THROW((TimeGrid{0.0, 1.0, 0.0, 1}.steps()), ConfigError);
  EXPECT_THROW((TimeGrid{0.0, 1.0, 0.3, 1}.steps()), ConfigError);
  EXPECT_THROW((TimeGrid{1.0, 0.0, 0.1, 1}.steps()), ConfigError);
  EXPECT_THROW((TimeGrid{0.0, 1.0, 0.25, 0}.steps()), ConfigError);
}

TEST(Integrate, SingleStepMatchesStepFunction) {
  const auto m = build_model("nonlinear_wave", wave(8));
  const Vector mu = Vector::Ones(1), y0 = m->initial_condition(mu);
  const Trajectory tr = integrate(*m, y0, mu, TimeGrid{0.0, 0.01, 0.01, 1}, Scheme::StormerVerlet);
  EXPECT_EQ(tr.states.cols(), 2);
  EXPECT_EQ(tr.states.col(1), stormer_verlet_step(*m, y0, 0.01, mu));
}

TEST(Integrate, LinearWaveConservesEnergy) {
  const auto m = build_model("linear_wave", wave(32));
  const Vector mu = Vector::Constant(1, 1.3), y0 = m->initial_condition(mu);
  const Trajectory tr = integrate(*m, y0, mu, TimeGrid{0.0, 1.0, 1.0 / 256, 1}, Scheme::Midpoint);
  const double h0 = m->hamiltonian(y0, mu);
  for (Index i = 0; i < tr.states.cols(); ++i)
    EXPECT_NEAR(m->hamiltonian(tr.states.col(i), mu), h0, 1e-12 * (1 + h0));
}

TEST(Integrate, DampedWaveLosesEnergy) {
  const auto m = build_model("damped_wave", wave(32));
  const Vector mu = Vector::Ones(1), y0 = m->initial_condition(mu);
  const Trajectory tr = integrate(*m, y0, mu, TimeGrid{0.0, 1.0, 1.0 / 128, 1}, Scheme::Midpoint);
  double prev = m->hamiltonian(y0, mu);
  for (Index i = 1; i < tr.states.cols(); ++i) {
    const double h = m->hamiltonian(tr.states.col(i), mu);
    EXPECT_LE(h, prev + 1e-10 * (1 + prev));
    prev = h;
  }
  EXPECT_LT(prev, m->hamiltonian(y0, mu));
}

TEST(Integrate, NoncanonicalWaveConservesEnergy) {
  const auto m = build_model("noncanonical_wave", wave(16));
  const Vector mu = Vector::Ones(1), y0 = m->initial_condition(mu);
  const Trajectory tr = integrate(*m, y0, mu, TimeGrid{0.0, 0.5, 1.0 / 256, 4}, Scheme::Midpoint);
  const double h0 = m->hamiltonian(y0, mu);
  for (Index i = 0; i < tr.states.cols(); ++i)
    EXPECT_NEAR(m->hamiltonian(tr.states.col(i), mu), h0, 1e-10 * (1 + std::abs(h0)));
}

TEST(Integrate, SchemeKindMismatchRejected) {
  const auto m = build_model("noncanonical_wave", wave(8));
  const Vector mu = Vector::Ones(1);
  EXPECT_THROW(integrate(*m, m->initial_condition(mu), mu, TimeGrid{0, 0.1, 0.05, 1},
                         Scheme::StormerVerlet),
               UnsupportedModel);
  EXPECT_THROW(parse_scheme("rk4"), ConfigError);
  EXPECT_EQ(parse_scheme(to_string(Scheme::StormerVerlet)), Scheme::StormerVerlet);
}
