#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "dtem/grid.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

// Direct O(N^2) evaluation of the continuous-transform estimate
// sum_r f(r) exp(-i 2 pi q.r) dx dy, used as an FFT-independent oracle.
inline dtem::ComplexField2 naive_ft2(const dtem::ComplexField2& f) {
  const dtem::Grid2& g = f.grid();
  dtem::ComplexField2 out(g);
  for (int ky = 0; ky < g.ny(); ++ky)
    for (int kx = 0; kx < g.nx(); ++kx) {
      std::complex<double> acc = 0;
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix)
          acc += f(ix, iy) * std::polar(1.0, -2.0 * kPi * (g.qx(kx) * g.x(ix) + g.qy(ky) * g.y(iy)));
      out(kx, ky) = acc * g.dx() * g.dy();
    }
  return out;
}

template <typename T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

template <typename T>
double max_abs(const std::vector<T>& a) {
  double m = 0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

template <typename T>
double rms(const std::vector<T>& a) {
  double s = 0;
  for (const auto& v : a) s += std::norm(std::complex<double>(v));
  return std::sqrt(s / a.size());
}

template <typename T>
double rms_diff(const std::vector<T>& a, const std::vector<T>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(std::complex<double>(a[i] - b[i]));
  return std::sqrt(s / a.size());
}

inline dtem::RealField2 random_field(const dtem::Grid2& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  dtem::RealField2 f(g);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

}  // namespace testing

namespace testing {

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace testing
