#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "hamred/symplin.hpp"

namespace hamred {

// Binary matrix container:
//   "PSDS" | u32 version = 1 | u64 rows | u64 cols |
//   rows*cols f64, column-major, little-endian |
//   u64 record count, then per record: u32 byte length | u32 mu_dim |
//   mu_dim f64 | f64 t
// Basis files carry zero provenance records.
struct SnapshotFile {
  Matrix data;
  std::vector<std::pair<Vector, double>> provenance;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Throws IoError on failure, InvalidDimension when provenance is neither
/// empty nor one record per column.
void write_snapshot_file(const std::string& path, const SnapshotFile& file);
SnapshotFile read_snapshot_file(const std::string& path);

/// Shortest round-trip-safe decimal ("%.17g").
std::string format_double(double v);

// Minimal CSV writer; numeric cells use format_double.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append = false);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::FILE* f_ = nullptr;
  std::string path_;
};

}  // namespace hamred
