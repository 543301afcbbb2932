#include "qflow/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qflow/errors.hpp"

namespace qflow {

namespace detail {

namespace {
// The FFTW planner is not reentrant; execution on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

class FftPlan {
 public:
  FftPlan(std::size_t nx, std::size_t ny) : nx_(nx), ny_(ny) {
    std::vector<double> real(nx * ny);
    std::vector<std::complex<double>> spec(nx * (ny / 2 + 1));
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    // ESTIMATE keeps the chosen algorithm, and therefore the round-off,
    // identical from run to run.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft_r2c_2d(static_cast<int>(nx), static_cast<int>(ny), real.data(), c, flags);
    inv_ = fftw_plan_dft_c2r_2d(static_cast<int>(nx), static_cast<int>(ny), c, real.data(), flags);
    if (fwd_ == nullptr || inv_ == nullptr) throw Error("FFTW plan creation failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

  void forward(const double* in, std::complex<double>* out) const {
    // r2c does not modify its input.
    fftw_execute_dft_r2c(fwd_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  }
  void inverse(std::complex<double>* in, double* out) const {
    fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(in), out);
    const double scale = 1.0 / static_cast<double>(nx_ * ny_);
    std::for_each(out, out + nx_ * ny_, [scale](double& v) { v *= scale; });
  }

 private:
  std::size_t nx_;
  std::size_t ny_;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

}  // namespace detail

Grid::Grid(std::size_t nx, std::size_t ny, double lx, double ly, std::array<double, 2> origin)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), origin_(origin) {
  if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
    std::ostringstream os;
    os << "grid sizes must be even and >= 4, got " << nx << " x " << ny;
    throw ConfigError(os.str());
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    std::ostringstream os;
    os << "grid lengths must be positive and finite, got " << lx << " x " << ly;
    throw ConfigError(os.str());
  }
  if (!std::isfinite(origin[0]) || !std::isfinite(origin[1]))
    throw ConfigError("grid origin must be finite");
  plan_ = std::make_shared<const detail::FftPlan>(nx, ny);
}

Grid make_grid(std::size_t nx, std::size_t ny, double lx, double ly, std::array<double, 2> origin) {
  return Grid(nx, ny, lx, ly, origin);
}

double Grid::kx(std::size_t i) const {
  const double w = i <= nx_ / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(nx_);
  return 2.0 * std::numbers::pi * w / lx_;
}

double Grid::ky(std::size_t j) const {
  const double w = j <= ny_ / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(ny_);
  return 2.0 * std::numbers::pi * w / ly_;
}

bool Grid::same_as(const Grid& o) const {
  return nx_ == o.nx_ && ny_ == o.ny_ && lx_ == o.lx_ && ly_ == o.ly_ && origin_ == o.origin_;
}

void Grid::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() != size() || out.size() != spectral_size()) throw Error("forward transform: size mismatch");
  plan_->forward(in.data(), out.data());
}

void Grid::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
  if (in.size() != spectral_size() || out.size() != size()) throw Error("inverse transform: size mismatch");
  plan_->inverse(in.data(), out.data());
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_as(b)) throw Error(std::string(what) + ": operands live on different grids");
}

Field2D::Field2D(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

Field2D::Field2D(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error("Field2D: value count does not match grid");
}

Field2D& Field2D::operator+=(const Field2D& o) {
  require_same_grid(grid_, o.grid_, "Field2D +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& o) {
  require_same_grid(grid_, o.grid_, "Field2D -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

Field2D& Field2D::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field2D& Field2D::axpy(double a, const Field2D& o) {
  require_same_grid(grid_, o.grid_, "Field2D axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * o.values_[k];
  return *this;
}

double Field2D::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double Field2D::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool Field2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
Field2D operator*(double s, Field2D a) { return a *= s; }

Field2D hadamard(const Field2D& a, const Field2D& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  Field2D out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] * b[k];
  return out;
}

}  // namespace qflow
