#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hamred/commands.hpp"
#include "hamred/error.hpp"
#include "hamred/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving reduced basis pipeline for parametric Hamiltonian systems"};
  app.require_subcommand(1);
  std::string config_path;

  auto* fom = app.add_subcommand("fom", "Integrate the full model for every parameter sample");
  fom->add_option("--config", config_path, "Experiment file (JSON)")->required();

  std::string method;
  long long k = 0;
  auto* basis = app.add_subcommand("basis", "Build a reduced basis from stored snapshots");
  basis->add_option("--config", config_path, "Experiment file (JSON)")->required();
  basis->add_option("--method", method, "cotangent|complexsvd|svdlike|greedy|pod");
  basis->add_option("--k", k, "Half rank of the basis");

  std::string basis_path;
  auto* rom = app.add_subcommand("rom", "Simulate the reduced model on a stored basis");
  rom->add_option("--config", config_path, "Experiment file (JSON)")->required();
  rom->add_option("--basis", basis_path, "Basis file (.psds)")->required();

  std::vector<std::string> methods;
  auto* compare = app.add_subcommand("compare", "Compare reduction methods at the configured k");
  compare->add_option("--config", config_path, "Experiment file (JSON)")->required();
  compare->add_option("--methods", methods, "Methods to compare")->delimiter(',');

  auto* dlr = app.add_subcommand("dlr", "Dynamical low-rank reduced basis run");
  dlr->add_option("--config", config_path, "Experiment file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const hamred::ExperimentConfig cfg = hamred::load_config(config_path);
    if (fom->parsed()) {
      const auto snaps = hamred::cmd_fom(cfg);
      std::printf("fom: %lld snapshots of dimension %lld written to %s\n",
                  static_cast<long long>(snaps.data.cols()),
                  static_cast<long long>(snaps.data.rows()), cfg.output_dir.c_str());
    } else if (basis->parsed()) {
      const std::string m = method.empty() ? cfg.basis_method : method;
      const hamred::Index kk = k > 0 ? static_cast<hamred::Index>(k) : cfg.k;
      if (basis->count("--k") && k <= 0) throw hamred::ConfigError("--k: must be positive");
      const auto rep = hamred::cmd_basis(cfg, m, kk);
      std::printf("basis: %s k=%lld projection_error=%s\n", m.c_str(), static_cast<long long>(kk),
                  hamred::format_double(rep.projection_error).c_str());
      for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    } else if (rom->parsed()) {
      const auto rec = hamred::cmd_rom(cfg, basis_path);
      std::printf("rom: max_state_err=%s max_gap_deviation=%s max_H_drift=%s\n",
                  hamred::format_double(rec.max_state_error()).c_str(),
                  hamred::format_double(rec.max_gap_deviation()).c_str(),
                  hamred::format_double(rec.max_rom_energy_drift()).c_str());
    } else if (compare->parsed()) {
      const auto rows = hamred::cmd_compare(cfg, methods.empty() ? cfg.compare_methods : methods);
      for (const auto& r : rows)
        std::printf("compare: %s k=%lld max_state_err=%s max_H_drift=%s\n", r.method.c_str(),
                    static_cast<long long>(r.k), hamred::format_double(r.max_state_err).c_str(),
                    hamred::format_double(r.max_h_drift).c_str());
    } else if (dlr->parsed()) {
      const auto run = hamred::cmd_dlr(cfg);
      double s = 0.0, o = 0.0;
      for (std::size_t i = 0; i < run.times.size(); ++i) {
        s = std::max(s, run.symplecticity_drift[i]);
        o = std::max(o, run.orthonormality_drift[i]);
      }
      std::printf("dlr: max symplecticity drift=%s max orthonormality drift=%s\n",
                  hamred::format_double(s).c_str(), hamred::format_double(o).c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return hamred::exit_code(e);
  }
  return 0;
}
