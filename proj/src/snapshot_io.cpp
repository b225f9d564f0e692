#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "hamred/error.hpp"
#include "hamred/io.hpp"

namespace hamred {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot IO assumes a little-endian host");

constexpr char kMagic[4] = {'P', 'S', 'D', 'S'};

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const std::string& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError(path + ": unexpected end of file");
  return v;
}

}  // namespace

void write_snapshot_file(const std::string& path, const SnapshotFile& file) {
  const Matrix& M = file.data;
  if (!file.provenance.empty() && static_cast<Index>(file.provenance.size()) != M.cols())
    throw InvalidDimension("write_snapshot_file: provenance has " +
                           std::to_string(file.provenance.size()) + " records for " +
                           std::to_string(M.cols()) + " columns");
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path + ": cannot open for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kSnapshotVersion);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(M.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(M.cols()));
  os.write(reinterpret_cast<const char*>(M.data()),
           static_cast<std::streamsize>(M.size() * sizeof(double)));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(file.provenance.size()));
  for (const auto& [mu, t] : file.provenance) {
    const auto d = static_cast<std::uint32_t>(mu.size());
    put<std::uint32_t>(os, static_cast<std::uint32_t>(sizeof(std::uint32_t) + (d + 1) * 8));
    put<std::uint32_t>(os, d);
    os.write(reinterpret_cast<const char*>(mu.data()), static_cast<std::streamsize>(d * 8));
    put<double>(os, t);
  }
  if (!os) throw IoError(path + ": write failed");
}

SnapshotFile read_snapshot_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(path + ": cannot open for reading");
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": not a PSDS snapshot file");
  const auto version = get<std::uint32_t>(is, path);
  if (version != kSnapshotVersion)
    throw IoError(path + ": unsupported version " + std::to_string(version));
  const auto rows = get<std::uint64_t>(is, path);
  const auto cols = get<std::uint64_t>(is, path);
  if (rows > (1ULL << 32) || cols > (1ULL << 32) || rows * cols > (1ULL << 34))
    throw IoError(path + ": implausible matrix shape");
  SnapshotFile out;
  out.data.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  if (!is.read(reinterpret_cast<char*>(out.data.data()),
               static_cast<std::streamsize>(rows * cols * sizeof(double))))
    throw IoError(path + ": truncated payload");
  const auto records = get<std::uint64_t>(is, path);
  if (records != 0 && records != cols)
    throw IoError(path + ": provenance record count does not match column count");
  out.provenance.reserve(records);
  for (std::uint64_t r = 0; r < records; ++r) {
    const auto len = get<std::uint32_t>(is, path);
    const auto d = get<std::uint32_t>(is, path);
    if (len != sizeof(std::uint32_t) + (static_cast<std::uint64_t>(d) + 1) * 8)
      throw IoError(path + ": malformed provenance record");
    Vector mu(d);
    if (!is.read(reinterpret_cast<char*>(mu.data()), static_cast<std::streamsize>(d * 8)))
      throw IoError(path + ": truncated provenance");
    const double t = get<double>(is, path);
    out.provenance.emplace_back(std::move(mu), t);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw IoError(path + ": trailing bytes");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header, bool append)
    : path_(path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const bool fresh = !append || !std::filesystem::exists(p) || std::filesystem::file_size(p) == 0;
  f_ = std::fopen(path.c_str(), append ? "a" : "w");
  if (!f_) throw IoError(path + ": cannot open for writing");
  if (fresh) row(header);
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', f_);
    std::fputs(cells[i].c_str(), f_);
  }
  std::fputc('\n', f_);
  if (std::ferror(f_)) throw IoError(path_ + ": write failed");
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

}  // namespace hamred
