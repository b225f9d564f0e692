#pragma once

#include <exception>
#include <string>
#include <vector>

#include "hamred/config.hpp"
#include "hamred/dlr.hpp"
#include "hamred/psd.hpp"
#include "hamred/rom.hpp"

namespace hamred {

// Pipeline commands behind the `hamred` executable. Every command reads only
// the config (and files under its output_dir) and is deterministic.

/// Full-order runs for every parameter sample. Writes
///   fom/traj_<j>.psds   saved states of sample j
///   energy.csv          sample,t,H
///   snapshots.psds      all saved states, parameters outer, time inner
SnapshotMatrix cmd_fom(const ExperimentConfig& cfg);

/// Builds a basis of half rank k. Reads snapshots.psds (greedy integrates on
/// demand), writes basis_<method>_k<k>.psds and appends a row
/// method,k,projection_error,discarded_energy to basis_report.csv.
/// discarded_energy is the sum of squared discarded spectrum values; it equals
/// projection_error^2 for every method except greedy (reported as nan).
BasisReport cmd_basis(const ExperimentConfig& cfg, const std::string& method, Index k);

/// Simulates the reduced model of cfg.rom_mu() on the stored basis and the
/// full model alongside it. Writes rom_trajectory.psds and rom_diagnostics.csv.
DiagnosticsRecord cmd_rom(const ExperimentConfig& cfg, const std::string& basis_path);

struct CompareRow {
  std::string method;
  Index k = 0;
  double offline_s = 0.0;
  double online_s = 0.0;
  double max_state_err = 0.0;
  double max_h_drift = 0.0;  // max_t |H(A z(t)) - H(A z(0))|
};

/// Offline and online cost and accuracy per method at cfg.k, written to
/// compare.csv. pod uses 2k modes with plain Galerkin projection.
std::vector<CompareRow> cmd_compare(const ExperimentConfig& cfg,
                                    const std::vector<std::string>& methods);

/// Dynamical low-rank run over all parameter samples with half rank cfg.dlr_k.
/// Writes dlr_structure.csv (t, symplecticity, orthonormality, err_<j>) and
/// the final basis as dlr_basis.psds.
DlrRun cmd_dlr(const ExperimentConfig& cfg);

/// Basis of the given method from a snapshot matrix (greedy ignores M and
/// integrates the model itself).
BasisReport build_basis(const ExperimentConfig& cfg, const HamiltonianModel& model,
                        const Matrix& M, const std::string& method, Index k);

/// Reduced model matching the model kind: Galerkin, dissipative or
/// non-canonical projection for symplectic methods, plain Galerkin for pod.
ReducedModel reduce_for(const ExperimentConfig& cfg, std::shared_ptr<const HamiltonianModel> model,
                        const Matrix& basis, const std::string& method);

/// Initial reduced state: A^+ y0 for symplectic bases, U^T y0 otherwise.
Vector reduce_initial_state(const ReducedModel& rm, const Vector& y0);

/// 0 success, 2 configuration or validation error, 3 numerical failure,
/// 1 anything else.
int exit_code(const std::exception& e);

}  // namespace hamred
