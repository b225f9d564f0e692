#include "hamred/models.hpp"

#include <Eigen/QR>
#include <cmath>

#include "hamred/error.hpp"
#include "hamred/random.hpp"

namespace hamred {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Canonical:
      return "canonical";
    case ModelKind::Dissipative:
      return "dissipative";
    case ModelKind::Noncanonical:
      return "noncanonical";
  }
  return "unknown";
}

Vector HamiltonianModel::dissipation(const Vector& y, const Vector&) const {
  return Vector::Zero(y.size());
}

Matrix HamiltonianModel::dissipation_jacobian(const Vector& y, const Vector&) const {
  return Matrix::Zero(y.size(), y.size());
}

Vector HamiltonianModel::field(const Vector& y, const Vector& mu) const {
  const Vector g = gradient(y, mu);
  switch (kind()) {
    case ModelKind::Canonical:
      return apply_poisson(g);
    case ModelKind::Dissipative:
      return apply_poisson(g) + dissipation(y, mu);
    case ModelKind::Noncanonical:
      return apply_structure(g);
  }
  return g;
}

Matrix HamiltonianModel::field_jacobian(const Vector& y, const Vector& mu) const {
  const Matrix H = hessian(y, mu);
  switch (kind()) {
    case ModelKind::Canonical:
      return apply_poisson(H);
    case ModelKind::Dissipative:
      return apply_poisson(H) + dissipation_jacobian(y, mu);
    case ModelKind::Noncanonical:
      return structure() * H;
  }
  return H;
}

void HamiltonianModel::check_state(const Vector& y, const Vector& mu) const {
  if (y.size() != full_dim())
    throw InvalidDimension(name() + ": state has length " + std::to_string(y.size()) +
                           ", expected " + std::to_string(full_dim()));
  if (mu.size() != param_dim())
    throw InvalidDimension(name() + ": parameter has dimension " + std::to_string(mu.size()) +
                           ", expected " + std::to_string(param_dim()));
  if (!y.allFinite()) throw NonFiniteState(name() + ": state contains NaN or Inf");
  if (!mu.allFinite()) throw NonFiniteState(name() + ": parameter contains NaN or Inf");
}

Matrix periodic_stiffness(Index n) {
  if (n < 3) throw InvalidDimension("periodic_stiffness: need at least 3 grid points");
  const double inv_dx2 = static_cast<double>(n) * static_cast<double>(n);
  Matrix L = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    L(i, i) = 2.0 * inv_dx2;
    L(i, (i + 1) % n) -= inv_dx2;
    L(i, (i + n - 1) % n) -= inv_dx2;
  }
  return L;
}

Matrix seeded_congruence(Index dim, std::uint64_t seed) {
  CounterRng rng(seed, 0x4b);
  const Matrix G = rng.normal_matrix(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  Vector d(dim);
  for (Index i = 0; i < dim; ++i) d(i) = 0.5 + rng.next_uniform();
  return Q * d.asDiagonal();
}

namespace {

// Periodic wave family. All four registered models share H up to the
// sine-Gordon term and differ in how the gradient enters the field.
class WaveModel final : public HamiltonianModel {
 public:
  WaveModel(std::string name, ModelKind kind, const WaveOptions& opts, bool nonlinear)
      : name_(std::move(name)), kind_(kind), opts_(opts), nonlinear_(nonlinear) {
    if (opts.n < 3) throw InvalidDimension(name_ + ": n must be at least 3");
    if (!(opts.width > 0.0)) throw InvalidDimension(name_ + ": width must be positive");
    inv_dx2_ = static_cast<double>(opts.n) * static_cast<double>(opts.n);
    if (kind_ == ModelKind::Noncanonical) {
      const Matrix K = seeded_congruence(2 * opts.n, opts.seed);
      Matrix Js = K * apply_poisson(Matrix(K.transpose()));
      structure_ = 0.5 * (Js - Js.transpose());
    }
  }

  std::string name() const override { return name_; }
  ModelKind kind() const override { return kind_; }
  Index half_dim() const override { return opts_.n; }
  bool separable() const override { return true; }
  bool quadratic() const override { return !nonlinear_; }

  double hamiltonian(const Vector& y, const Vector& mu) const override {
    check_state(y, mu);
    const Index n = opts_.n;
    const auto q = y.head(n);
    const auto p = y.tail(n);
    double h = 0.5 * p.squaredNorm() + 0.5 * mu(0) * mu(0) * q.dot(stiffness(q));
    if (nonlinear_) h += opts_.h * (1.0 - q.array().cos()).sum();
    return h;
  }

  Vector gradient(const Vector& y, const Vector& mu) const override {
    check_state(y, mu);
    const Index n = opts_.n;
    Vector g(2 * n);
    g.head(n) = mu(0) * mu(0) * stiffness(y.head(n));
    if (nonlinear_) g.head(n).array() += opts_.h * y.head(n).array().sin();
    g.tail(n) = y.tail(n);
    return g;
  }

  Matrix hessian(const Vector& y, const Vector& mu) const override {
    check_state(y, mu);
    const Index n = opts_.n;
    Matrix H = Matrix::Zero(2 * n, 2 * n);
    H.topLeftCorner(n, n) = mu(0) * mu(0) * periodic_stiffness(n);
    if (nonlinear_) H.topLeftCorner(n, n).diagonal().array() += opts_.h * y.head(n).array().cos();
    H.bottomRightCorner(n, n).setIdentity();
    return H;
  }

  Vector dissipation(const Vector& y, const Vector& mu) const override {
    check_state(y, mu);
    Vector d = Vector::Zero(y.size());
    if (kind_ == ModelKind::Dissipative) d.tail(opts_.n) = -opts_.damping * y.tail(opts_.n);
    return d;
  }

  Matrix dissipation_jacobian(const Vector& y, const Vector& mu) const override {
    check_state(y, mu);
    Matrix J = Matrix::Zero(y.size(), y.size());
    if (kind_ == ModelKind::Dissipative)
      J.bottomRightCorner(opts_.n, opts_.n).diagonal().setConstant(-opts_.damping);
    return J;
  }

  Matrix structure() const override {
    return kind_ == ModelKind::Noncanonical ? structure_ : poisson_matrix(opts_.n);
  }

  Vector apply_structure(const Vector& g) const override {
    return kind_ == ModelKind::Noncanonical ? Vector(structure_ * g) : Vector(apply_poisson(g));
  }

  // q(x, 0) = exp(-mu ((x - 1/2) / width)^2), p = 0. The parameter also sets
  // the pulse width so that initial states differ across parameters.
  Vector initial_condition(const Vector& mu) const override {
    check_state(Vector::Zero(full_dim()), mu);
    const Index n = opts_.n;
    Vector y = Vector::Zero(2 * n);
    for (Index i = 0; i < n; ++i) {
      const double d = (static_cast<double>(i) / n - 0.5) / opts_.width;
      y(i) = std::exp(-mu(0) * d * d);
    }
    return y;
  }

 private:
  Vector stiffness(const Eigen::Ref<const Vector>& q) const {
    const Index n = q.size();
    Vector out(n);
    for (Index i = 0; i < n; ++i)
      out(i) = inv_dx2_ * (2.0 * q(i) - q((i + 1) % n) - q((i + n - 1) % n));
    return out;
  }

  std::string name_;
  ModelKind kind_;
  WaveOptions opts_;
  bool nonlinear_;
  double inv_dx2_ = 0.0;
  Matrix structure_;
};

}  // namespace

std::shared_ptr<const HamiltonianModel> build_model(const std::string& name,
                                                   const WaveOptions& opts) {
  if (name == "linear_wave")
    return std::make_shared<WaveModel>(name, ModelKind::Canonical, opts, false);
  if (name == "nonlinear_wave")
    return std::make_shared<WaveModel>(name, ModelKind::Canonical, opts, true);
  if (name == "damped_wave") {
    if (opts.damping < 0.0) throw InvalidDimension("damped_wave: damping must be non-negative");
    return std::make_shared<WaveModel>(name, ModelKind::Dissipative, opts, false);
  }
  if (name == "noncanonical_wave")
    return std::make_shared<WaveModel>(name, ModelKind::Noncanonical, opts, false);
  throw UnsupportedModel("unknown model name '" + name + "'");
}

}  // namespace hamred
