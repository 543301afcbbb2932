#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qflow {

namespace detail {
class FftPlan;
}

/// Periodic uniform 2D grid over [ox, ox+lx) x [oy, oy+ly).
///
/// Samples are stored row-major with the x index outermost: value (i, j)
/// lives at offset i*ny + j and sits at (ox + i*hx, oy + j*hy).
///
/// Copies share one immutable FFT plan, so a Grid is cheap to pass by value.
class Grid {
 public:
  Grid(std::size_t nx, std::size_t ny, double lx, double ly,
       std::array<double, 2> origin = {0.0, 0.0});

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / static_cast<double>(nx_); }
  double hy() const { return ly_ / static_cast<double>(ny_); }
  double cell_area() const { return hx() * hy(); }
  double area() const { return lx_ * ly_; }
  std::array<double, 2> origin() const { return origin_; }

  double x(std::size_t i) const { return origin_[0] + static_cast<double>(i) * hx(); }
  double y(std::size_t j) const { return origin_[1] + static_cast<double>(j) * hy(); }

  /// Angular wavenumber of row i: 2*pi*wrap(i)/lx with wrap(i) = i for
  /// i <= nx/2 and i - nx otherwise.
  double kx(std::size_t i) const;
  double ky(std::size_t j) const;

  /// Number of complex coefficients in the half spectrum (nx * (ny/2 + 1)).
  std::size_t spectral_size() const { return nx_ * (ny_ / 2 + 1); }

  /// Two grids are compatible when sizes and geometry agree exactly.
  bool same_as(const Grid& other) const;

  /// Unnormalized forward r2c transform; `out` has spectral_size() entries.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse c2r transform including the 1/(nx*ny) normalization. `in` is
  /// consumed as scratch.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

 private:
  std::size_t nx_;
  std::size_t ny_;
  double lx_;
  double ly_;
  std::array<double, 2> origin_;
  std::shared_ptr<const detail::FftPlan> plan_;
};

Grid make_grid(std::size_t nx, std::size_t ny, double lx, double ly,
               std::array<double, 2> origin = {0.0, 0.0});

/// Real samples on a Grid.
class Field2D {
 public:
  explicit Field2D(Grid grid, double fill = 0.0);
  Field2D(Grid grid, std::vector<double> values);

  /// Samples f(x, y) at every grid node.
  template <typename Fn>
  static Field2D from_function(const Grid& grid, Fn&& fn) {
    Field2D out(grid);
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t j = 0; j < grid.ny(); ++j)
        out(i, j) = fn(grid.x(i), grid.y(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.ny() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * grid_.ny() + j]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  Field2D& operator+=(const Field2D& o);
  Field2D& operator-=(const Field2D& o);
  Field2D& operator*=(double s);
  /// this += a * o
  Field2D& axpy(double a, const Field2D& o);

  double mean() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator-(Field2D a, const Field2D& b);
Field2D operator*(double s, Field2D a);
/// Pointwise product.
Field2D hadamard(const Field2D& a, const Field2D& b);

/// Throws qflow::Error when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace qflow
