#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qflow/grid.hpp"
#include "qflow/model.hpp"

namespace qflow {

struct ConvergenceTable;

/// First line of a snapshot file:
///   QFLD1 nx ny lx ly origin_x origin_y time model scheme
/// followed by nx*ny little-endian float64 samples, row-major.
struct SnapshotHeader {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  std::array<double, 2> origin{0.0, 0.0};
  double time = 0.0;
  std::string model;
  std::string scheme;

  bool operator==(const SnapshotHeader&) const = default;
};

struct SnapshotData {
  SnapshotHeader header;
  std::vector<double> values;

  /// The samples on their grid (ConfigError if the geometry is not a valid grid).
  Field2D field() const;
};

SnapshotHeader make_snapshot_header(const Field2D& field, double time, std::string model, std::string scheme);

/// IoError on write failure or labels containing whitespace.
void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header, std::span<const double> values);
void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header, const Field2D& field);

/// IoError on bad magic, malformed header, dimension overflow, or a payload
/// that ends early ("truncated at value k").
SnapshotData read_snapshot(const std::filesystem::path& path);

/// CSV with header `step,time,energy,modified_energy,r,m`, doubles in
/// scientific notation with 17 significant digits, absent r/m as empty cells.
void write_energy_series(const std::filesystem::path& path, std::span<const EnergyRecord> records);
std::string format_energy_series(std::span<const EnergyRecord> records);
std::vector<EnergyRecord> read_energy_series(const std::filesystem::path& path);

/// CSV: dt, then `<label>_error,<label>_rate` per column; failed cells are
/// written as `fail`, the first rate of each column is empty.
void write_convergence_table(const std::filesystem::path& path, const ConvergenceTable& table);
/// Human-readable aligned table.
std::string format_convergence_table(const ConvergenceTable& table);

/// Writes `text` to `path`, replacing it (IoError on failure).
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Exclusive claim on an output directory: creates the directory if needed
/// and a `.qflow.lock` file inside it with O_EXCL. A second claim on the same
/// directory fails with IoError until the first is released.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

  const std::filesystem::path& path() const { return lock_path_; }

 private:
  std::filesystem::path lock_path_;
};

}  // namespace qflow
