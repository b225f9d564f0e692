#include "hamred/rom.hpp"

#include <algorithm>
#include <cmath>

#include "hamred/error.hpp"
#include "hamred/io.hpp"

namespace hamred {

namespace {

void require_model(const std::shared_ptr<const HamiltonianModel>& model, const Matrix& basis,
                   const char* what) {
  if (!model) throw InvalidDimension(std::string(what) + ": null model");
  if (basis.rows() != model->full_dim())
    throw InvalidDimension(std::string(what) + ": basis has " + std::to_string(basis.rows()) +
                           " rows, model dimension is " + std::to_string(model->full_dim()));
}

void require_orthonormal(const Matrix& U, const char* what) {
  const double res = orthonormality_residual(U);
  if (res > 1e-10)
    throw StructureViolation(std::string(what) + ": ||U^T U - I||_max = " + format_double(res));
}

// diag(Phi, Phi): lets Stormer-Verlet run on the reduced model.
bool is_block_diagonal(const Matrix& A) {
  if (A.rows() % 2 || A.cols() % 2) return false;
  const Index n = A.rows() / 2, k = A.cols() / 2;
  return A.topRightCorner(n, k).cwiseAbs().maxCoeff() == 0.0 &&
         A.bottomLeftCorner(n, k).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

ReducedModel::ReducedModel(std::shared_ptr<const HamiltonianModel> model, Matrix basis,
                           Matrix left, Matrix dissipation_map, Matrix structure, RomKind kind)
    : model_(std::move(model)),
      basis_(std::move(basis)),
      left_(std::move(left)),
      dissipation_map_(std::move(dissipation_map)),
      structure_(std::move(structure)),
      kind_(kind) {
  block_diagonal_ = kind_ == RomKind::Canonical && model_->separable() && is_block_diagonal(basis_);
}

double ReducedModel::hamiltonian(const Vector& z, const Vector& mu) const {
  return model_->hamiltonian(basis_ * z, mu);
}

Vector ReducedModel::gradient(const Vector& z, const Vector& mu) const {
  return basis_.transpose() * model_->gradient(basis_ * z, mu);
}

Vector ReducedModel::field(const Vector& z, const Vector& mu) const {
  const Vector y = basis_ * z;
  Vector out = left_ * model_->gradient(y, mu);
  if (dissipation_map_.size() > 0) out += dissipation_map_ * model_->dissipation(y, mu);
  return out;
}

Matrix ReducedModel::field_jacobian(const Vector& z, const Vector& mu) const {
  const Vector y = basis_ * z;
  Matrix out = left_ * (model_->hessian(y, mu) * basis_);
  if (dissipation_map_.size() > 0)
    out += dissipation_map_ * (model_->dissipation_jacobian(y, mu) * basis_);
  return out;
}

OdeSystem ReducedModel::system(const Vector& mu) const {
  model_->check_state(Vector::Zero(model_->full_dim()), mu);
  OdeSystem sys;
  sys.dim = dim();
  sys.field = [this, mu](const Vector& z) { return field(z, mu); };
  sys.jacobian = [this, mu](const Vector& z) { return field_jacobian(z, mu); };
  if (model_->quadratic()) sys.linear = field_jacobian(Vector::Zero(dim()), mu);
  if (block_diagonal_) {
    const Index k = dim() / 2;
    sys.grad_q = [this, mu, k](const Vector& z) { return Vector(gradient(z, mu).head(k)); };
    sys.grad_p = [this, mu, k](const Vector& z) { return Vector(gradient(z, mu).tail(k)); };
  }
  return sys;
}

ReducedModel galerkin_reduce(std::shared_ptr<const HamiltonianModel> model,
                             const SymplecticBasis& A) {
  require_model(model, A.matrix(), "galerkin_reduce");
  if (model->kind() != ModelKind::Canonical)
    throw UnsupportedModel("galerkin_reduce: " + model->name() + " is not canonical");
  const Matrix left = apply_poisson(Matrix(A.matrix().transpose()));
  return ReducedModel(std::move(model), A.matrix(), left, Matrix(),
                      poisson_matrix(A.half_rank()), RomKind::Canonical);
}

ReducedModel dissipative_reduce(std::shared_ptr<const HamiltonianModel> model,
                                const SymplecticBasis& A, bool require_vertical) {
  require_model(model, A.matrix(), "dissipative_reduce");
  if (model->kind() == ModelKind::Noncanonical)
    throw UnsupportedModel("dissipative_reduce: " + model->name() + " is non-canonical");
  if (require_vertical) {
    const Matrix qs = A.block_qs();
    const double norm = qs.size() ? qs.cwiseAbs().maxCoeff() : 0.0;
    if (norm > 1e-10)
      throw StructureViolation(
          "dissipative_reduce: basis is not vertical, ||A_qs||_max = " + format_double(norm) +
          "; the reduced dissipation may inject energy");
  }
  const Matrix left = apply_poisson(Matrix(A.matrix().transpose()));
  return ReducedModel(std::move(model), A.matrix(), left, symplectic_inverse(A),
                      poisson_matrix(A.half_rank()), RomKind::Dissipative);
}

ReducedModel noncanonical_reduce(std::shared_ptr<const HamiltonianModel> model, const Matrix& U) {
  require_model(model, U, "noncanonical_reduce");
  require_orthonormal(U, "noncanonical_reduce");
  const Matrix JU = [&] {
    Matrix out(U.rows(), U.cols());
    for (Index j = 0; j < U.cols(); ++j) out.col(j) = model->apply_structure(U.col(j));
    return out;
  }();
  Matrix W = U.transpose() * JU;
  W = (0.5 * (W - W.transpose())).eval();
  const Matrix left = W * U.transpose();
  return ReducedModel(std::move(model), U, left, Matrix(), W, RomKind::Noncanonical);
}

ReducedModel pod_galerkin_reduce(std::shared_ptr<const HamiltonianModel> model, const Matrix& U) {
  require_model(model, U, "pod_galerkin_reduce");
  require_orthonormal(U, "pod_galerkin_reduce");
  if (model->kind() != ModelKind::Canonical)
    throw UnsupportedModel("pod_galerkin_reduce: " + model->name() + " is not canonical");
  const Matrix left = apply_poisson(U).transpose() * -1.0;  // U^T J = -(J U)^T
  return ReducedModel(std::move(model), U, left, Matrix(), Matrix(), RomKind::PodGalerkin);
}

Vector reduced_initial_condition(const SymplecticBasis& A, const Vector& y0) {
  if (y0.size() != A.full_dim())
    throw InvalidDimension("reduced_initial_condition: state has length " +
                           std::to_string(y0.size()) + ", basis has " +
                           std::to_string(A.full_dim()) + " rows");
  return symplectic_inverse(A) * y0;
}

Trajectory simulate_rom(const ReducedModel& rm, const Vector& z0, const Vector& mu,
                        const TimeGrid& grid, Scheme scheme, MidpointOptions opts) {
  Trajectory tr = integrate(rm.system(mu), z0, grid, scheme, opts);
  tr.mu = mu;
  return tr;
}

double DiagnosticsRecord::max_state_error() const {
  return state_error.empty() ? 0.0 : *std::max_element(state_error.begin(), state_error.end());
}

double DiagnosticsRecord::max_gap_deviation() const {
  double m = 0.0;
  for (double g : hamiltonian_gap) m = std::max(m, std::abs(g - hamiltonian_gap.front()));
  return m;
}

double DiagnosticsRecord::max_rom_energy_drift() const {
  double m = 0.0;
  for (double h : hamiltonian_rom) m = std::max(m, std::abs(h - hamiltonian_rom.front()));
  return m;
}

DiagnosticsRecord diagnostics(const Trajectory& fom, const Trajectory& rom,
                              const ReducedModel& rm) {
  if (fom.times.size() != rom.times.size())
    throw InvalidDimension("diagnostics: full and reduced time grids differ in length");
  for (std::size_t i = 0; i < fom.times.size(); ++i)
    if (std::abs(fom.times[i] - rom.times[i]) > 1e-12 * (1.0 + std::abs(fom.times[i])))
      throw InvalidDimension("diagnostics: full and reduced time grids differ");
  const HamiltonianModel& model = rm.full_model();
  DiagnosticsRecord rec;
  rec.times = fom.times;
  for (std::size_t i = 0; i < fom.times.size(); ++i) {
    const Index c = static_cast<Index>(i);
    const Vector y = fom.states.col(c);
    const Vector yr = rm.reconstruct(rom.states.col(c));
    const double hf = model.hamiltonian(y, fom.mu);
    const double hr = model.hamiltonian(yr, fom.mu);
    rec.state_error.push_back((y - yr).norm());
    rec.hamiltonian_fom.push_back(hf);
    rec.hamiltonian_rom.push_back(hr);
    rec.hamiltonian_gap.push_back(std::abs(hf - hr));
  }
  return rec;
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& rec) {
  CsvWriter csv(path, {"t", "state_err", "H_fom", "H_rom", "H_gap"});
  for (std::size_t i = 0; i < rec.times.size(); ++i)
    csv.row(std::vector<double>{rec.times[i], rec.state_error[i], rec.hamiltonian_fom[i],
                                rec.hamiltonian_rom[i], rec.hamiltonian_gap[i]});
}

}  // namespace hamred
