#include "dtem/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dtem {

namespace {

constexpr double kPi = std::numbers::pi;

// Transfer function on the raw DFT layout, including the 1/N of the inverse.
std::vector<cplx> transfer_function(const Grid2& g, double lambda, double distance, PropagatorKind kind,
                                    bool bandlimit) {
  std::vector<cplx> h(g.size());
  const double norm = 1.0 / static_cast<double>(g.size());
  const double cutoff = 2.0 / 3.0 * std::min(g.qmax_x(), g.qmax_y());
  const double cutoff2 = cutoff * cutoff;
  const double k = 1.0 / lambda;
  for (int ky = 0; ky < g.ny(); ++ky) {
    for (int kx = 0; kx < g.nx(); ++kx) {
      const double q2 = g.q2(kx, ky);
      cplx value = 0;
      if (!bandlimit || q2 <= cutoff2) {
        double phase = 0;
        if (kind == PropagatorKind::paraxial) {
          phase = -kPi * lambda * distance * q2;
          value = std::polar(norm, phase);
        } else if (q2 < k * k) {
          phase = 2.0 * kPi * distance * (std::sqrt(k * k - q2) - k);
          value = std::polar(norm, phase);
        }
      }
      h[g.index(kx, ky)] = value;
    }
  }
  return h;
}

void apply_transfer(ComplexField2& f, const std::vector<cplx>& h) {
  const Grid2& g = f.grid();
  fft::transform_2d(f.data(), g.nx(), g.ny(), -1);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= h[i];
  fft::transform_2d(f.data(), g.nx(), g.ny(), +1);
}

}  // namespace

Wavefield plane_wave(const Grid2& g, const Beam& b, double z) {
  return Wavefield{ComplexField2(g, cplx(std::sqrt(b.intensity()), 0.0)), b, z};
}

Wavefield propagate(const Wavefield& w, double distance, PropagatorKind kind) {
  Wavefield out = w;
  out.z = w.z + distance;
  if (distance == 0.0) return out;
  apply_transfer(out.field, transfer_function(w.field.grid(), w.beam.lambda(), distance, kind, false));
  return out;
}

Wavefield phase_grating(const Wavefield& w, const RealField2& slice) {
  require(slice.grid() == w.field.grid(), ErrorCode::mismatch, "phase grating grid differs from wavefield grid");
  Wavefield out = w;
  const double sigma = w.beam.interaction();
  for (std::size_t i = 0; i < slice.size(); ++i) out.field[i] *= std::polar(1.0, sigma * slice[i]);
  return out;
}

Wavefield refocus(const Wavefield& w, double to_plane) { return propagate(w, to_plane - w.z); }

RealField2 intensity_contrast(const Wavefield& w) {
  RealField2 k(w.field.grid());
  const double inv = 1.0 / w.beam.intensity();
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = 1.0 - std::norm(w.field[i]) * inv;
  return k;
}

Wavefield multislice(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                     const MultisliceOptions& opts) {
  const Phantom rotated = theta == 0.0 ? p : rotate_y(p, theta);
  const Grid2& plane = g.plane();
  const double thickness = rotated.thickness();
  const int slices = std::max(1, static_cast<int>(std::lround(thickness / g.dz())));
  const double step = thickness / slices;
  const double z0 = rotated.z0();
  const double inf = std::numeric_limits<double>::infinity();
  const double sigma = b.interaction();

  const auto h_step = transfer_function(plane, b.lambda(), step, opts.propagator, opts.bandlimit);
  Wavefield w = plane_wave(plane, b, z0 + 0.5 * step);
  for (int m = 0; m < slices; ++m) {
    const double lo = m == 0 ? -inf : z0 + m * step;
    const double hi = m == slices - 1 ? inf : z0 + (m + 1) * step;
    const RealField2 slice = slab_projection(rotated, plane, lo, hi);
    const double peak = *std::max_element(slice.values().begin(), slice.values().end(),
                                          [](double a, double c) { return std::abs(a) < std::abs(c); });
    if (std::abs(peak) * sigma > opts.max_slice_phase) {
      std::ostringstream os;
      os << "slice phase " << std::abs(peak) * sigma << " rad exceeds " << opts.max_slice_phase
         << " rad; use dz <= " << step * opts.max_slice_phase / (std::abs(peak) * sigma) << " A";
      fail(ErrorCode::invalid_argument, os.str());
    }
    if (m > 0) apply_transfer(w.field, h_step);
    for (std::size_t i = 0; i < slice.size(); ++i) w.field[i] *= std::polar(1.0, sigma * slice[i]);
  }
  const double image_plane = rotated.center_z() + defocus;
  const double last = z0 + (slices - 0.5) * step;
  apply_transfer(w.field, transfer_function(plane, b.lambda(), image_plane - last, opts.propagator, opts.bandlimit));
  w.z = image_plane;
  return w;
}

Wavefield projection_exit_wave(const Phantom& p, const Grid3& g, const Beam& b, double theta) {
  const RealField2 projected = line_projection(p, g.plane(), theta);
  Wavefield w = plane_wave(g.plane(), b, g.center_z());
  if (!p.empty()) w.z = (theta == 0.0 ? p : rotate_y(p, theta)).center_z();
  const double sigma = b.interaction();
  for (std::size_t i = 0; i < projected.size(); ++i) w.field[i] *= std::polar(1.0, sigma * projected[i]);
  return w;
}

}  // namespace dtem
