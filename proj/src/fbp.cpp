#include "dtem/fbp.hpp"

#include <cmath>
#include <numbers>

#include "dtem/numerics.hpp"
#include "dtem/parallel.hpp"
#include "dtem/projection_set.hpp"

namespace dtem {

namespace {

constexpr double kPi = std::numbers::pi;

// Spectrum of the band-limited spatial Ram-Lak kernel on a padded row of
// length n (spacing tau), times tau for the convolution integral.
std::vector<cplx> ramp_spectrum(int n, double tau, FbpFilter filter) {
  std::vector<cplx> h(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int k = i <= n / 2 ? i : i - n;
    if (k == 0)
      h[i] = 1.0 / (4.0 * tau * tau);
    else if (k % 2 != 0)
      h[i] = -1.0 / (static_cast<double>(k) * k * kPi * kPi * tau * tau);
  }
  fft::transform_1d(h, n, -1);
  for (int i = 0; i < n; ++i) {
    double window = 1.0;
    if (filter == FbpFilter::hann) {
      const double f = static_cast<double>(i <= n / 2 ? i : n - i) / (n / 2);
      window = 0.5 * (1.0 + std::cos(kPi * f));
    }
    // Real and even kernel: drop round-off imaginary parts. 1/n undoes the
    // unnormalised inverse transform.
    h[i] = h[i].real() * window * tau / n;
  }
  return h;
}

}  // namespace

RealField2 ramp_filter(const RealField2& projection, FbpFilter filter) {
  const Grid2& g = projection.grid();
  const int n = 2 * g.nx();
  const auto h = ramp_spectrum(n, g.dx(), filter);
  RealField2 out(g);
  std::vector<cplx> row(n);
  for (int iy = 0; iy < g.ny(); ++iy) {
    std::fill(row.begin(), row.end(), cplx(0.0));
    for (int ix = 0; ix < g.nx(); ++ix) row[ix] = projection(ix, iy);
    fft::transform_1d(row, n, -1);
    for (int k = 0; k < n; ++k) row[k] *= h[k];
    fft::transform_1d(row, n, +1);
    for (int ix = 0; ix < g.nx(); ++ix) out(ix, iy) = row[ix].real();
  }
  return out;
}

Volume3 fbp_reconstruct(const std::vector<RealField2>& projections, const std::vector<double>& angles,
                        const Grid3& volume, const FbpOptions& opts) {
  require(projections.size() == angles.size(), ErrorCode::mismatch, "projection and angle counts differ");
  require_uniform_angles(angles);
  for (const auto& p : projections)
    require(p.grid() == volume.plane(), ErrorCode::mismatch, "projection grid differs from the volume plane");
  const Grid2& g = volume.plane();
  const std::size_t count = angles.size();

  // Opposite views are averaged by summing all of [0, 2 pi) at half the
  // pi-range weight. Folding p_pi(-s) onto p(s) first would halve the work
  // but the grid column at x = -L/2 has no mirror partner.
  const std::size_t views = count;
  std::vector<RealField2> filtered(views);
  parallel_for(views, opts.threads, [&](std::size_t i) { filtered[i] = ramp_filter(projections[i], opts.filter); });
  const double weight = kPi / count;

  Volume3 out(volume);
  const int nx = g.nx();
  std::vector<double> cosv(views), sinv(views);
  for (std::size_t i = 0; i < views; ++i) {
    cosv[i] = std::cos(angles[i]);
    sinv[i] = std::sin(angles[i]);
  }
  parallel_for(static_cast<std::size_t>(g.ny()), opts.threads, [&](std::size_t yi) {
    const int iy = static_cast<int>(yi);
    for (std::size_t v = 0; v < views; ++v) {
      const double* row = &filtered[v](0, iy);
      for (int iz = 0; iz < volume.nz(); ++iz) {
        const double u = volume.z_rel(iz);
        // Detector coordinate s = x cos + u sin in pixel units.
        const double base = (u * sinv[v]) / g.dx() + nx / 2;
        const double slope = cosv[v];
        double* dst = &out(0, iy, iz);
        for (int ix = 0; ix < nx; ++ix) {
          // Linear interpolation with zeros beyond the detector edges.
          const double f = base + slope * (ix - nx / 2);
          const double fl = std::floor(f);
          if (fl < -1.0 || fl > nx - 1) continue;
          const int i0 = static_cast<int>(fl);
          const double t = f - fl;
          const double lo = i0 >= 0 ? row[i0] : 0.0;
          const double hi = i0 + 1 < nx ? row[i0 + 1] : 0.0;
          dst[ix] += weight * ((1.0 - t) * lo + t * hi);
        }
      }
    }
  });
  return out;
}

}  // namespace dtem
