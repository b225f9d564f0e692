#include "hamred/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include <Eigen/SVD>

#include "hamred/error.hpp"
#include "hamred/io.hpp"
#include "hamred/parallel.hpp"

namespace hamred {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const char* kSnapshots = "snapshots.psds";

void validate_method(const std::string& method) {
  static const std::vector<std::string> known = {"cotangent", "complexsvd", "svdlike", "greedy",
                                                 "pod"};
  for (const auto& m : known)
    if (m == method) return;
  throw ConfigError("--method: unknown method '" + method +
                    "' (expected cotangent, complexsvd, svdlike, greedy or pod)");
}

void validate_k(Index k, const HamiltonianModel& model) {
  if (k < 1 || k > model.half_dim())
    throw ConfigError("--k: must lie in [1, " + std::to_string(model.half_dim()) + "], got " +
                      std::to_string(k));
}

SnapshotMatrix read_snapshots(const ExperimentConfig& cfg, const HamiltonianModel& model) {
  SnapshotFile f = read_snapshot_file(cfg.output_path(kSnapshots));
  if (f.data.rows() != model.full_dim())
    throw InvalidDimension(cfg.output_path(kSnapshots) + ": snapshots have " +
                           std::to_string(f.data.rows()) + " rows, model dimension is " +
                           std::to_string(model.full_dim()));
  return {std::move(f.data), std::move(f.provenance)};
}

double tail_energy(const Vector& spectrum, Index keep) {
  double s = 0.0;
  for (Index i = keep; i < spectrum.size(); ++i) s += spectrum(i) * spectrum(i);
  return s;
}

}  // namespace

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidDimension*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const UnsupportedModel*>(&e) ||
      dynamic_cast<const StructureViolation*>(&e) || dynamic_cast<const InsufficientRank*>(&e))
    return 2;
  if (dynamic_cast<const Error*>(&e)) return 3;
  return 1;
}

SnapshotMatrix cmd_fom(const ExperimentConfig& cfg) {
  const auto model = cfg.build();
  const ParameterSet params = cfg.parameter_set();
  SnapshotMatrix snaps = assemble_snapshots(*model, params, cfg.scheme);
  const Index per = static_cast<Index>(params.grid.saved_times().size());

  std::filesystem::create_directories(cfg.output_path("fom"));
  CsvWriter energy(cfg.output_path("energy.csv"), {"sample", "t", "H"});
  for (std::size_t j = 0; j < params.samples.size(); ++j) {
    const Index c0 = static_cast<Index>(j) * per;
    SnapshotFile traj;
    traj.data = snaps.data.middleCols(c0, per);
    traj.provenance.assign(snaps.provenance.begin() + c0, snaps.provenance.begin() + c0 + per);
    write_snapshot_file(cfg.output_path("fom/traj_" + std::to_string(j) + ".psds"), traj);
    for (Index i = 0; i < per; ++i) {
      const auto& [mu, t] = traj.provenance[static_cast<std::size_t>(i)];
      energy.row(std::vector<std::string>{std::to_string(j), format_double(t),
                                          format_double(model->hamiltonian(traj.data.col(i), mu))});
    }
  }
  write_snapshot_file(cfg.output_path(kSnapshots), {snaps.data, snaps.provenance});
  return snaps;
}

BasisReport build_basis(const ExperimentConfig& cfg, const HamiltonianModel& model,
                        const Matrix& M, const std::string& method, Index k) {
  validate_method(method);
  validate_k(k, model);
  if (method == "cotangent") return cotangent_lift(M, k);
  if (method == "complexsvd") return complex_svd_basis(M, k, cfg.complex_order);
  if (method == "svdlike") return psd_svd_like_basis(M, k);
  if (method == "greedy") {
    GreedyOptions opts;
    opts.k_max = k;
    opts.tol = cfg.greedy_tol;
    opts.indicator = cfg.greedy_indicator;
    opts.scheme = cfg.scheme;
    GreedyResult res = greedy_symplectic_basis(model, cfg.parameter_set(), opts);
    if (res.report.basis.cols() != 2 * k)
      throw InsufficientRank("greedy: stopped (" + res.status + ") with " +
                             std::to_string(res.report.basis.cols() / 2) + " of " +
                             std::to_string(k) + " pairs");
    return res.report;
  }
  // pod: 2k modes, the same reduced dimension as the symplectic methods.
  BasisReport rep;
  rep.method = "pod";
  if (2 * k > M.cols())
    throw InsufficientRank("pod: 2k = " + std::to_string(2 * k) + " exceeds the " +
                           std::to_string(M.cols()) + " snapshots");
  rep.basis = pod_basis(M, 2 * k);
  rep.projection_error = (M - rep.basis * (rep.basis.transpose() * M)).norm();
  Eigen::BDCSVD<Matrix> svd(M);
  rep.spectrum = svd.singularValues();
  return rep;
}

ReducedModel reduce_for(const ExperimentConfig& cfg, std::shared_ptr<const HamiltonianModel> model,
                        const Matrix& basis, const std::string& method) {
  switch (model->kind()) {
    case ModelKind::Noncanonical:
      return noncanonical_reduce(std::move(model), basis);
    case ModelKind::Dissipative:
      if (method == "pod")
        throw UnsupportedModel("pod: plain Galerkin projection needs a canonical model");
      return dissipative_reduce(std::move(model), SymplecticBasis(basis, false),
                                cfg.require_vertical);
    case ModelKind::Canonical:
      break;
  }
  if (method == "pod") return pod_galerkin_reduce(std::move(model), basis);
  return galerkin_reduce(std::move(model), SymplecticBasis(basis, false));
}

Vector reduce_initial_state(const ReducedModel& rm, const Vector& y0) {
  if (rm.kind() == RomKind::PodGalerkin || rm.kind() == RomKind::Noncanonical)
    return rm.basis().transpose() * y0;
  return reduced_initial_condition(SymplecticBasis(rm.basis(), false), y0);
}

BasisReport cmd_basis(const ExperimentConfig& cfg, const std::string& method, Index k) {
  const auto model = cfg.build();
  validate_method(method);
  validate_k(k, *model);
  const Matrix M = method == "greedy" ? Matrix() : read_snapshots(cfg, *model).data;
  BasisReport rep = build_basis(cfg, *model, M, method, k);

  const std::string name = "basis_" + method + "_k" + std::to_string(k) + ".psds";
  write_snapshot_file(cfg.output_path(name), {rep.basis, {}});
  const double discarded = method == "greedy"
                               ? std::numeric_limits<double>::quiet_NaN()
                               : tail_energy(rep.spectrum, method == "pod" ? 2 * k : k);
  CsvWriter csv(cfg.output_path("basis_report.csv"),
                {"method", "k", "projection_error", "discarded_energy"}, true);
  csv.row(std::vector<std::string>{method, std::to_string(k), format_double(rep.projection_error),
                                   format_double(discarded)});
  return rep;
}

DiagnosticsRecord cmd_rom(const ExperimentConfig& cfg, const std::string& basis_path) {
  const auto model = cfg.build();
  const Matrix basis = read_snapshot_file(basis_path).data;
  if (basis.rows() != model->full_dim())
    throw InvalidDimension(basis_path + ": basis has " + std::to_string(basis.rows()) +
                           " rows, model dimension is " + std::to_string(model->full_dim()));
  const ReducedModel rm = reduce_for(cfg, model, basis, "symplectic");
  const Vector mu = cfg.rom_mu();
  const Vector y0 = model->initial_condition(mu);

  const Trajectory fom = integrate(*model, y0, mu, cfg.grid, cfg.scheme);
  const Trajectory rom = simulate_rom(rm, reduce_initial_state(rm, y0), mu, cfg.grid, cfg.scheme);
  const DiagnosticsRecord rec = diagnostics(fom, rom, rm);

  SnapshotFile traj;
  traj.data = rom.states;
  for (double t : rom.times) traj.provenance.emplace_back(mu, t);
  write_snapshot_file(cfg.output_path("rom_trajectory.psds"), traj);
  write_diagnostics_csv(cfg.output_path("rom_diagnostics.csv"), rec);
  return rec;
}

std::vector<CompareRow> cmd_compare(const ExperimentConfig& cfg,
                                    const std::vector<std::string>& methods) {
  const auto model = cfg.build();
  for (const auto& m : methods) validate_method(m);
  validate_k(cfg.k, *model);
  const Matrix M = std::filesystem::exists(cfg.output_path(kSnapshots))
                       ? read_snapshots(cfg, *model).data
                       : assemble_snapshots(*model, cfg.parameter_set(), cfg.scheme).data;
  const Vector mu = cfg.rom_mu();
  const Vector y0 = model->initial_condition(mu);
  const Trajectory fom = integrate(*model, y0, mu, cfg.grid, cfg.scheme);

  std::vector<CompareRow> rows;
  for (const auto& method : methods) {
    CompareRow row;
    row.method = method;
    row.k = cfg.k;
    auto start = Clock::now();
    const BasisReport rep = build_basis(cfg, *model, M, method, cfg.k);
    row.offline_s = seconds_since(start);

    const ReducedModel rm = reduce_for(cfg, model, rep.basis, method);
    start = Clock::now();
    const Trajectory rom =
        simulate_rom(rm, reduce_initial_state(rm, y0), mu, cfg.grid, cfg.scheme);
    row.online_s = seconds_since(start);

    const DiagnosticsRecord rec = diagnostics(fom, rom, rm);
    row.max_state_err = rec.max_state_error();
    row.max_h_drift = rec.max_rom_energy_drift();
    rows.push_back(row);
  }

  CsvWriter csv(cfg.output_path("compare.csv"),
                {"method", "k", "offline_s", "online_s", "max_state_err", "max_H_drift"});
  for (const auto& r : rows)
    csv.row(std::vector<std::string>{r.method, std::to_string(r.k), format_double(r.offline_s),
                                     format_double(r.online_s), format_double(r.max_state_err),
                                     format_double(r.max_h_drift)});
  return rows;
}

DlrRun cmd_dlr(const ExperimentConfig& cfg) {
  const auto model = cfg.build();
  if (model->kind() != ModelKind::Canonical)
    throw UnsupportedModel("dlr: " + model->name() + " is not a canonical Hamiltonian model");
  validate_k(cfg.dlr_k, *model);
  const std::vector<Vector>& params = cfg.samples;
  const DlrState s0 = dlr_initial_state(*model, params, cfg.dlr_k, cfg.complex_order);
  const DlrRun run = dlr_integrate(s0, *model, params, cfg.grid);

  // Reference full-order trajectories for the per-parameter error columns.
  std::vector<Trajectory> fom(params.size());
  parallel_for(params.size(), [&](std::size_t j) {
    fom[j] = integrate(*model, model->initial_condition(params[j]), params[j], cfg.grid, cfg.scheme);
  });

  std::vector<std::string> header = {"t", "symplecticity", "orthonormality"};
  for (std::size_t j = 0; j < params.size(); ++j) header.push_back("err_" + std::to_string(j));
  CsvWriter csv(cfg.output_path("dlr_structure.csv"), header);
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const DlrState& s = run.states[i];
    std::vector<double> row = {run.times[i], run.symplecticity_drift[i],
                               run.orthonormality_drift[i]};
    for (std::size_t j = 0; j < params.size(); ++j) {
      const Index c = static_cast<Index>(j);
      row.push_back((s.A * s.Z.col(c) - fom[j].states.col(static_cast<Index>(i))).norm());
    }
    csv.row(row);
  }
  write_snapshot_file(cfg.output_path("dlr_basis.psds"), {run.states.back().A, {}});
  return run;
}

}  // namespace hamred
