#include "qflow/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qflow/config.hpp"
#include "qflow/errors.hpp"
#include "qflow/harness.hpp"

namespace qflow {

namespace {

constexpr std::string_view kMagic = "QFLD1";
constexpr std::size_t kMaxHeaderBytes = 4096;
constexpr std::size_t kMaxSamples = std::size_t{1} << 32;

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
  }
  return v;
}

std::string scientific(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

bool has_space(const std::string& s) {
  return s.empty() || s.find_first_of(" \t\r\n") != std::string::npos;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace

Field2D SnapshotData::field() const {
  return Field2D(make_grid(header.nx, header.ny, header.lx, header.ly, header.origin), values);
}

SnapshotHeader make_snapshot_header(const Field2D& field, double time, std::string model, std::string scheme) {
  const Grid& g = field.grid();
  return {g.nx(), g.ny(), g.lx(), g.ly(), g.origin(), time, std::move(model), std::move(scheme)};
}

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& h, std::span<const double> values) {
  if (has_space(h.model) || has_space(h.scheme))
    throw IoError("snapshot labels must be non-empty and free of whitespace");
  if (values.size() != h.nx * h.ny) throw IoError("snapshot payload size does not match nx * ny");
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out << kMagic << ' ' << h.nx << ' ' << h.ny << ' ' << format_double(h.lx) << ' ' << format_double(h.ly) << ' '
      << format_double(h.origin[0]) << ' ' << format_double(h.origin[1]) << ' ' << format_double(h.time) << ' '
      << h.model << ' ' << h.scheme << '\n';
  std::vector<char> buf(values.size() * 8);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(values[k]));
    std::memcpy(buf.data() + 8 * k, &bits, 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

void write_snapshot(const std::filesystem::path& path, const SnapshotHeader& header, const Field2D& field) {
  write_snapshot(path, header, field.values());
}

SnapshotData read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path.string() + "'");
  const std::string where = "snapshot '" + path.string() + "': ";

  std::string line;
  char ch = 0;
  while (in.get(ch) && ch != '\n') {
    line.push_back(ch);
    if (line.size() > kMaxHeaderBytes) throw IoError(where + "header line too long");
  }
  if (ch != '\n') throw IoError(where + "missing header line");

  std::istringstream hs(line);
  hs.imbue(std::locale::classic());
  std::string magic, nx, ny, lx, ly, ox, oy, t;
  SnapshotData out;
  SnapshotHeader& h = out.header;
  if (!(hs >> magic) || magic != kMagic) throw IoError(where + "bad magic (expected QFLD1)");
  if (!(hs >> nx >> ny >> lx >> ly >> ox >> oy >> t >> h.model >> h.scheme)) throw IoError(where + "malformed header");
  std::string extra;
  if (hs >> extra) throw IoError(where + "trailing header fields");

  auto count = [&](const std::string& s) {
    unsigned long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc::result_out_of_range) throw IoError(where + "dimension overflow");
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError(where + "malformed dimension '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  auto number = [&](const std::string& s) {
    const auto v = parse_double(s);
    if (!v) throw IoError(where + "malformed number '" + s + "'");
    return *v;
  };
  h.nx = count(nx);
  h.ny = count(ny);
  if (h.nx == 0 || h.ny == 0 || h.nx > kMaxSamples / h.ny) throw IoError(where + "dimension overflow");
  h.lx = number(lx);
  h.ly = number(ly);
  h.origin = {number(ox), number(oy)};
  h.time = number(t);

  const std::size_t n = h.nx * h.ny;
  out.values.resize(n);
  std::vector<char> buf(8 * n);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got < buf.size()) throw IoError(where + "truncated at value " + std::to_string(got / 8));
  if (in.peek() != std::char_traits<char>::eof()) throw IoError(where + "trailing bytes after payload");
  for (std::size_t k = 0; k < n; ++k) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf.data() + 8 * k, 8);
    out.values[k] = std::bit_cast<double>(to_little_endian(bits));
  }
  return out;
}

std::string format_energy_series(std::span<const EnergyRecord> records) {
  std::string s = "step,time,energy,modified_energy,r,m\n";
  for (const auto& r : records) {
    s += std::to_string(r.step);
    s += ',' + scientific(r.time) + ',' + scientific(r.energy_original) + ',' + scientific(r.energy_modified) + ',';
    if (r.r) s += scientific(*r.r);
    s += ',';
    if (r.m) s += scientific(*r.m);
    s += '\n';
  }
  return s;
}

void write_energy_series(const std::filesystem::path& path, std::span<const EnergyRecord> records) {
  if (records.empty()) throw IoError("refusing to write an empty energy series");
  write_text_file(path, format_energy_series(records));
}

std::vector<EnergyRecord> read_energy_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open energy series '" + path.string() + "'");
  const std::string where = "energy series '" + path.string() + "'";
  std::string line;
  if (!std::getline(in, line) || line != "step,time,energy,modified_energy,r,m")
    throw IoError(where + ": missing or wrong header");
  std::vector<EnergyRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    auto bad = [&](const std::string& what) -> IoError {
      return IoError(where + ":" + std::to_string(lineno) + ": " + what);
    };
    if (cells.size() != 6) throw bad("expected 6 cells");
    auto num = [&](std::string_view c) {
      const auto v = parse_double(c);
      if (!v) throw bad("malformed number '" + std::string(c) + "'");
      return *v;
    };
    EnergyRecord r;
    const auto res = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), r.step);
    if (res.ec != std::errc() || res.ptr != cells[0].data() + cells[0].size()) throw bad("malformed step");
    r.time = num(cells[1]);
    r.energy_original = num(cells[2]);
    r.energy_modified = num(cells[3]);
    if (!cells[4].empty()) r.r = num(cells[4]);
    if (!cells[5].empty()) r.m = num(cells[5]);
    out.push_back(r);
  }
  return out;
}

void write_convergence_table(const std::filesystem::path& path, const ConvergenceTable& t) {
  std::string s = "dt";
  for (const auto& l : t.labels) s += ',' + l + "_error," + l + "_rate";
  s += '\n';
  for (std::size_t row = 0; row < t.dts.size(); ++row) {
    s += scientific(t.dts[row]);
    for (const auto& col : t.cells) {
      const auto& c = col[row];
      s += ',' + (c.error ? scientific(*c.error) : std::string("fail")) + ',';
      if (c.rate) s += scientific(*c.rate);
    }
    s += '\n';
  }
  write_text_file(path, s);
}

std::string format_convergence_table(const ConvergenceTable& t) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::left << std::setw(12) << "dt";
  for (const auto& l : t.labels) os << std::setw(14) << (l + " error") << std::setw(8) << "rate";
  os << '\n';
  for (std::size_t row = 0; row < t.dts.size(); ++row) {
    os << std::setw(12) << std::setprecision(5) << std::defaultfloat << t.dts[row];
    for (const auto& col : t.cells) {
      const auto& c = col[row];
      std::ostringstream e, r;
      if (c.error) e << std::scientific << std::setprecision(4) << *c.error;
      else e << "fail";
      if (c.rate) r << std::fixed << std::setprecision(2) << *c.rate;
      else r << "-";
      os << std::setw(14) << e.str() << std::setw(8) << r.str();
    }
    os << '\n';
  }
  for (std::size_t i = 0; i < t.cells.size(); ++i)
    for (std::size_t row = 0; row < t.cells[i].size(); ++row)
      if (!t.cells[i][row].failure.empty())
        os << t.labels[i] << " at dt=" << t.dts[row] << ": " << t.cells[i][row].failure << '\n';
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  finish(out, path);
}

RunLock::RunLock(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  lock_path_ = dir / ".qflow.lock";
  const int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw IoError("output directory '" + dir.string() + "' is locked by another run (remove " +
                    lock_path_.string() + " if that run is gone)");
    throw IoError("cannot create lock file '" + lock_path_.string() + "': " + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(lock_path_, ec);
}

}  // namespace qflow
