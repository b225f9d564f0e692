#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hamred/commands.hpp"
#include "hamred/error.hpp"
#include "hamred/io.hpp"
#include "test_support.hpp"

using namespace hamred;
using namespace hamred::testing;

namespace {

std::string smoke_json(const std::string& out, const std::string& extra = "",
                       const std::string& model = R"("name": "linear_wave", "n": 32)") {
  return R"({"version": 1, "seed": 3, "model": {)" + model +
         R"(}, "parameters": {"samples": [0.9, 1.1]},
            "time": {"t0": 0.0, "t_end": 0.25, "dt": 0.0078125, "save_every": 2},
            "basis": {"method": "complexsvd", "k": 4}, "dlr": {"k": 2},
            "output_dir": ")" + out + "\"" + extra + "}";
}

ExperimentConfig smoke(const std::string& name, const std::string& extra = "") {
  return parse_config(smoke_json(scratch_dir(name).string(), extra));
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream is(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(SnapshotIo, RoundTripIsBitExact) {
  CounterRng rng(61);
  const auto dir = scratch_dir("roundtrip");
  SnapshotFile f;
  f.data = rng.normal_matrix(40, 25);
  f.data(0, 0) = -0.0;
  f.data(1, 0) = std::numeric_limits<double>::denorm_min();
  f.data(2, 0) = std::numeric_limits<double>::max();
  for (Index j = 0; j < 25; ++j) f.provenance.emplace_back(rng.normal_matrix(2, 1), 0.1 * j);
  const std::string path = (dir / "m.psds").string();
  write_snapshot_file(path, f);
  const SnapshotFile g = read_snapshot_file(path);
  ASSERT_EQ(g.data.rows(), 40);
  ASSERT_EQ(g.data.cols(), 25);
  EXPECT_EQ(std::memcmp(g.data.data(), f.data.data(), sizeof(double) * f.data.size()), 0);
  ASSERT_EQ(g.provenance.size(), 25u);
  for (std::size_t j = 0; j < 25; ++j) {
    EXPECT_EQ(g.provenance[j].first, f.provenance[j].first);
    EXPECT_EQ(g.provenance[j].second, f.provenance[j].second);
  }
  const std::string bytes = read_bytes(path);
  EXPECT_EQ(bytes.substr(0, 4), "PSDS");
  EXPECT_EQ(bytes.size(), 4 + 4 + 8 + 8 + 40 * 25 * 8 + 8 + 25 * (4 + 4 + 2 * 8 + 8));
}

TEST(SnapshotIo, LargeMatrixRoundTrip) {
  CounterRng rng(62);
  const auto dir = scratch_dir("large");
  SnapshotFile f;
  f.data = rng.normal_matrix(1000, 1000);
  const std::string path = (dir / "big.psds").string();
  write_snapshot_file(path, f);
  EXPECT_EQ(read_snapshot_file(path).data, f.data);
}

TEST(SnapshotIo, CorruptFilesRejected) {
  const auto dir = scratch_dir("corrupt");
  SnapshotFile f;
  f.data = Matrix::Ones(4, 3);
  const std::string path = (dir / "ok.psds").string();
  write_snapshot_file(path, f);
  const std::string good = read_bytes(path);

  auto write_raw = [&](const std::string& name, const std::string& bytes) {
    const std::string p = (dir / name).string();
    std::ofstream(p, std::ios::binary) << bytes;
    return p;
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(read_snapshot_file(write_raw("magic.psds", bad_magic)), IoError);
  EXPECT_THROW(read_snapshot_file(write_raw("short.psds", good.substr(0, good.size() - 12))), IoError);
  EXPECT_THROW(read_snapshot_file(write_raw("long.psds", good + "junk")), IoError);
  std::string bad_version = good;
  bad_version[4] = 9;
  EXPECT_THROW(read_snapshot_file(write_raw("version.psds", bad_version)), IoError);
  EXPECT_THROW(read_snapshot_file((dir / "missing.psds").string()), IoError);

  f.provenance.emplace_back(Vector::Ones(1), 0.0);
  EXPECT_THROW(write_snapshot_file((dir / "prov.psds").string(), f), InvalidDimension);
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  CounterRng rng(63);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.next_normal() * std::pow(10.0, static_cast<int>(rng.next_uniform() * 40) - 20);
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
  const auto dir = scratch_dir("csv");
  const std::string path = (dir / "x.csv").string();
  {
    CsvWriter w(path, {"a", "b"});
    w.row(std::vector<double>{0.1, 1.0 / 3.0});
  }
  const auto rows = read_csv(path);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(std::strtod(rows[1][1].c_str(), nullptr), 1.0 / 3.0);
}

TEST(Config, ParsesAndExpandsGrid) {
  const ExperimentConfig c = parse_config(R"({"version": 1, "model": {"name": "damped_wave", "n": 16, "damping": 0.3},
      "parameters": {"grid": {"lower": 0.5, "upper": 1.5, "count": 3}},
      "time": {"t_end": 1.0, "dt": 0.25}, "integrator": "midpoint"})");
  EXPECT_EQ(c.model_name, "damped_wave");
  EXPECT_EQ(c.wave.n, 16);
  EXPECT_DOUBLE_EQ(c.wave.damping, 0.3);
  ASSERT_EQ(c.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(c.samples[1](0), 1.0);
  EXPECT_EQ(c.grid.steps(), 4);
}

TEST(Config, ErrorsNameTheField) {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  const std::string base = R"("model": {"name": "linear_wave", "n": 16}, "parameters": {"samples": [1.0]})";
  EXPECT_NE(message(R"({"version": 1, )" + base + R"(, "colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(message(R"({"version": 2, )" + base + "}").find("version"), std::string::npos);
  EXPECT_NE(message(R"({)" + base + "}").find("version"), std::string::npos);
  EXPECT_NE(message(R"({"version": 1, "model": {"name": "heat", "n": 16}, "parameters": {"samples": [1.0]}})")
                .find("model.name"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, )" + base + R"(, "time": {"t_end": 1.0, "dt": 0.0}})").find("dt"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, )" + base + R"(, "basis": {"method": "nlp"}})").find("basis.method"),
            std::string::npos);
  EXPECT_FALSE(message("{not json").empty());
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code(ConfigError("x")), 2);
  EXPECT_EQ(exit_code(InvalidDimension("x")), 2);
  EXPECT_EQ(exit_code(IoError("x")), 2);
  EXPECT_EQ(exit_code(StructureViolation("x")), 2);
  EXPECT_EQ(exit_code(InsufficientRank("x")), 2);
  EXPECT_EQ(exit_code(UnsupportedModel("x")), 2);
  EXPECT_EQ(exit_code(StepFailure("x", 1.0)), 3);
  EXPECT_EQ(exit_code(RankDegeneracy("x")), 3);
  EXPECT_EQ(exit_code(NonFiniteState("x")), 3);
  EXPECT_EQ(exit_code(std::runtime_error("x")), 1);
}

TEST(Commands, FomWritesFilesAndIsDeterministic) {
  const ExperimentConfig cfg = smoke("fom");
  const SnapshotMatrix s = cmd_fom(cfg);
  EXPECT_EQ(s.data.cols(), 2 * 17);
  const std::string first = read_bytes(cfg.output_path("snapshots.psds"));
  EXPECT_EQ(read_snapshot_file(cfg.output_path("fom/traj_1.psds")).data, s.data.rightCols(17));
  const auto energy = read_csv(cfg.output_path("energy.csv"));
  ASSERT_EQ(energy.size(), 35u);
  EXPECT_EQ(energy[0], (std::vector<std::string>{"sample", "t", "H"}));
  const double h0 = std::strtod(energy[1][2].c_str(), nullptr);
  for (std::size_t i = 1; i <= 17; ++i)
    EXPECT_NEAR(std::strtod(energy[i][2].c_str(), nullptr), h0, 1e-10 * (1 + h0));
  cmd_fom(cfg);
  EXPECT_EQ(read_bytes(cfg.output_path("snapshots.psds")), first);
}

TEST(Commands, BasisPersistsStructure) {
  const ExperimentConfig cfg = smoke("basis");
  cmd_fom(cfg);
  cmd_basis(cfg, "complexsvd", 4);
  const Matrix A = read_snapshot_file(cfg.output_path("basis_complexsvd_k4.psds")).data;
  EXPECT_EQ(A.cols(), 8);
  EXPECT_TRUE(is_symplectic(A, 1e-10));
  const std::string first = read_bytes(cfg.output_path("basis_complexsvd_k4.psds"));
  cmd_basis(cfg, "complexsvd", 4);
  EXPECT_EQ(read_bytes(cfg.output_path("basis_complexsvd_k4.psds")), first);

  const BasisReport r = cmd_basis(cfg, "svdlike", 3);
  const Matrix S = read_snapshot_file(cfg.output_path("basis_svdlike_k3.psds")).data;
  const Matrix M = read_snapshot_file(cfg.output_path("snapshots.psds")).data;
  const double e2 = (M - S * symplectic_inverse(S) * M).squaredNorm();
  const auto rows = read_csv(cfg.output_path("basis_report.csv"));
  const double discarded = std::strtod(rows.back()[3].c_str(), nullptr);
  EXPECT_NEAR(e2, discarded, 1e-8 * M.squaredNorm());
  EXPECT_NEAR(r.projection_error * r.projection_error, discarded, 1e-8 * M.squaredNorm());
  EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "k", "projection_error", "discarded_energy"}));

  EXPECT_THROW(cmd_basis(cfg, "complexsvd", 33), ConfigError);
  EXPECT_THROW(cmd_basis(cfg, "nlp", 2), ConfigError);
}

TEST(Commands, RomWithIdentityBasisMatchesFom) {
  const ExperimentConfig cfg = smoke("rom");
  cmd_fom(cfg);
  SnapshotFile id;
  id.data = Matrix::Identity(64, 64);
  const std::string path = cfg.output_path("identity.psds");
  write_snapshot_file(path, id);
  const DiagnosticsRecord d = cmd_rom(cfg, path);
  EXPECT_LE(d.max_state_error(), 1e-10);
  EXPECT_LE(d.max_gap_deviation(), 1e-10);
  const auto rows = read_csv(cfg.output_path("rom_diagnostics.csv"));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "state_err", "H_fom", "H_rom", "H_gap"}));
  EXPECT_THROW(cmd_rom(cfg, cfg.output_path("missing.psds")), IoError);
  SnapshotFile wrong;
  wrong.data = Matrix::Identity(10, 4);
  write_snapshot_file(cfg.output_path("wrong.psds"), wrong);
  EXPECT_THROW(cmd_rom(cfg, cfg.output_path("wrong.psds")), InvalidDimension);
}

TEST(Commands, CompareTableHasSixColumns) {
  const ExperimentConfig cfg = smoke("compare");
  const auto rows = cmd_compare(cfg, {"pod", "complexsvd"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].method, "pod");
  EXPECT_EQ(rows[1].method, "complexsvd");
  const auto csv = read_csv(cfg.output_path("compare.csv"));
  ASSERT_EQ(csv.size(), 3u);
  for (const auto& r : csv) EXPECT_EQ(r.size(), 6u);
  EXPECT_EQ(csv[0][5], "max_H_drift");
}

TEST(Commands, DlrDeterministicAndStructured) {
  const ExperimentConfig cfg = parse_config(smoke_json(scratch_dir("dlr").string(), "",
                                                       R"("name": "linear_wave", "n": 16)"));
  const DlrRun run = cmd_dlr(cfg);
  for (double s : run.symplecticity_drift) EXPECT_LE(s, 1e-8);
  for (double o : run.orthonormality_drift) EXPECT_LE(o, 1e-8);
  const std::string a = read_bytes(cfg.output_path("dlr_structure.csv"));
  const std::string b = read_bytes(cfg.output_path("dlr_basis.psds"));
  cmd_dlr(cfg);
  EXPECT_EQ(read_bytes(cfg.output_path("dlr_structure.csv")), a);
  EXPECT_EQ(read_bytes(cfg.output_path("dlr_basis.psds")), b);
  EXPECT_EQ(read_csv(cfg.output_path("dlr_structure.csv"))[0].size(), 5u);
}
