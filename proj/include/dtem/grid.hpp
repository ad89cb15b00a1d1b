#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dtem/error.hpp"

namespace dtem {

using cplx = std::complex<double>;

// Uniform 2D sampling. Real-space sample i sits at x = (i - nx/2)*dx, so the
// optical axis (x = y = 0) is the sample (nx/2, ny/2). Frequency index k uses
// the standard wrap-around order: q = k/(nx*dx) for k < nx/2, (k-nx)/(nx*dx)
// otherwise. Arrays are row-major with x fastest.
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int nx, int ny, double dx, double dy);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

  double x(int ix) const { return (ix - nx_ / 2) * dx_; }
  double y(int iy) const { return (iy - ny_ / 2) * dy_; }
  double dqx() const { return 1.0 / (nx_ * dx_); }
  double dqy() const { return 1.0 / (ny_ * dy_); }
  double qx(int kx) const { return (kx < nx_ / 2 ? kx : kx - nx_) * dqx(); }
  double qy(int ky) const { return (ky < ny_ / 2 ? ky : ky - ny_) * dqy(); }
  double qmax_x() const { return 0.5 / dx_; }
  double qmax_y() const { return 0.5 / dy_; }
  double q2(int kx, int ky) const {
    const double a = qx(kx), b = qy(ky);
    return a * a + b * b;
  }
  // Index of -x (real space) or -q_x (reciprocal space); exact on both grids.
  int mirror_x(int ix) const { return (nx_ - ix) % nx_; }
  bool is_nyquist(int kx, int ky) const { return kx == nx_ / 2 || ky == ny_ / 2; }

  bool operator==(const Grid2&) const = default;

 private:
  int nx_ = 0, ny_ = 0;
  double dx_ = 0, dy_ = 0;
};

// 3D sampling: a Grid2 plane plus an axial axis. The object slab is [z0, 0]
// (z = 0 is the exit plane) and the rotation axis passes through the slab
// mid-plane z0/2. Axial sample k lies at z0/2 + (k - nz/2)*dz.
class Grid3 {
 public:
  Grid3() = default;
  Grid3(const Grid2& plane, int nz, double dz, double z0);

  const Grid2& plane() const { return plane_; }
  int nx() const { return plane_.nx(); }
  int ny() const { return plane_.ny(); }
  int nz() const { return nz_; }
  double dx() const { return plane_.dx(); }
  double dy() const { return plane_.dy(); }
  double dz() const { return dz_; }
  double z0() const { return z0_; }
  double center_z() const { return 0.5 * z0_; }
  std::size_t size() const { return plane_.size() * nz_; }
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * ny() + iy) * nx() + ix;
  }
  // Axial coordinate relative to the rotation centre.
  double z_rel(int iz) const { return (iz - nz_ / 2) * dz_; }
  double z(int iz) const { return center_z() + z_rel(iz); }
  double dqz() const { return 1.0 / (nz_ * dz_); }
  double qz(int kz) const { return (kz < nz_ / 2 ? kz : kz - nz_) * dqz(); }
  double qmax_z() const { return 0.5 / dz_; }

  bool operator==(const Grid3&) const = default;

 private:
  Grid2 plane_;
  int nz_ = 0;
  double dz_ = 0, z0_ = 0;
};

template <typename T>
class Field2 {
 public:
  Field2() = default;
  explicit Field2(const Grid2& grid, T fill = T{}) : grid_(grid), data_(grid.size(), fill) {}

  const Grid2& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  T& operator()(int ix, int iy) { return data_[grid_.index(ix, iy)]; }
  const T& operator()(int ix, int iy) const { return data_[grid_.index(ix, iy)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

 private:
  Grid2 grid_;
  std::vector<T> data_;
};

template <typename T>
class Field3 {
 public:
  Field3() = default;
  explicit Field3(const Grid3& grid, T fill = T{}) : grid_(grid), data_(grid.size(), fill) {}

  const Grid3& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  T& operator()(int ix, int iy, int iz) { return data_[grid_.index(ix, iy, iz)]; }
  const T& operator()(int ix, int iy, int iz) const { return data_[grid_.index(ix, iy, iz)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

 private:
  Grid3 grid_;
  std::vector<T> data_;
};

using RealField2 = Field2<double>;
using ComplexField2 = Field2<cplx>;
using Volume3 = Field3<double>;
using ComplexVolume3 = Field3<cplx>;

ComplexField2 to_complex(const RealField2& f);
RealField2 real_part(const ComplexField2& f);
// f(-x, y); exact for the centred sampling.
RealField2 mirror_x(const RealField2& f);
// Row/column rolled by n/2: turns wrap-around spectra into centred views.
template <typename T>
Field2<T> centered_view(const Field2<T>& f) {
  Field2<T> out(f.grid());
  const int nx = f.grid().nx(), ny = f.grid().ny();
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) out((ix + nx / 2) % nx, (iy + ny / 2) % ny) = f(ix, iy);
  return out;
}

}  // namespace dtem
