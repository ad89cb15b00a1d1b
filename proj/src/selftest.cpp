#include "dtem/selftest.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dtem/dt_recon.hpp"
#include "dtem/propagation.hpp"
#include "dtem/tie_recon.hpp"

namespace dtem {

int run_selftest(const std::function<void(const std::string&)>& line) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, double value) {
    std::ostringstream os;
    os << (ok ? "PASS " : "FAIL ") << name << " (" << value << ")";
    if (!ok) ++failures;
    line(os.str());
  };
  const Beam beam = Beam::from_voltage(200e3);
  report("wavelength at 200 kV near 0.025 A", std::abs(beam.lambda() / 0.025 - 1) < 0.01, beam.lambda());
  const double nf = fresnel_number(1.0, 0.025, 100.0);
  report("Fresnel number 0.4", std::abs(nf - 0.4) < 1e-12, nf);

  const Grid2 plane(32, 32, 0.5, 0.5);
  Wavefield w = plane_wave(plane, beam, 0.0);
  for (int i = 0; i < static_cast<int>(w.field.size()); ++i) w.field[i] = std::polar(1.0, 0.3 * std::sin(0.7 * i));
  double before = 0, after = 0;
  const Wavefield moved = propagate(w, 137.0);
  for (std::size_t i = 0; i < w.field.size(); ++i) {
    before += std::norm(w.field[i]);
    after += std::norm(moved.field[i]);
  }
  report("propagation conserves intensity", std::abs(after / before - 1) < 1e-10, after / before - 1);

  const Grid3 g(plane, 32, 0.5, -16.0);
  const Phantom p({Atom{{1.0, 0.5, -6.0}, 50, 0.8}, Atom{{-2.0, -1.0, -10.0}, 50, 0.8}}, -16.0);
  const double theta = 0.6, z = 45.0;
  const ComplexField2 k = fft2_forward(born_contrast(p, g, beam, theta, z).image);
  const ComplexField2 kpi = fft2_forward(born_contrast(p, g, beam, theta + std::numbers::pi, z).image);
  double err = 0, ref = 0;
  for (int ky = 0; ky < plane.ny(); ++ky)
    for (int kx = 0; kx < plane.nx(); ++kx) {
      const double q2 = plane.q2(kx, ky);
      if (plane.is_nyquist(kx, ky) || std::abs(std::sin(2 * std::numbers::pi * beam.lambda() * z * q2)) <= 0.1)
        continue;
      const cplx v = solve_paraboloid_sample(k(kx, ky), kpi(plane.mirror_x(kx), ky), std::sqrt(q2), z, beam, 0.0);
      const cplx want = analytic_ft3(p, paraboloid_point(plane.qx(kx), plane.qy(ky), theta, beam.lambda()));
      err = std::max(err, std::abs(v - want));
      ref = std::max(ref, std::abs(want));
    }
  report("paraboloid solution inverts Born data", err / ref < 1e-6, err / ref);

  const RealField2 phi = line_projection(p, plane, 0.0);
  RealField2 lap = laplacian_2d(phi);
  TieOptions o;
  o.alpha = 0;
  o.pad_fraction = 0;
  for (auto& v : lap.values()) v *= beam.lambda() * z / (2 * std::numbers::pi);
  const RealField2 back = tie_phase(SymmetrizedContrast{lap, 0, z}, beam, o);
  double mean = 0;
  for (double v : phi.values()) mean += v;
  mean /= phi.size();
  double e2 = 0, t2 = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    e2 += std::pow(back[i] - (phi[i] - mean), 2);
    t2 += std::pow(phi[i] - mean, 2);
  }
  report("TIE inversion round trip", std::sqrt(e2 / t2) < 1e-6, std::sqrt(e2 / t2));
  return failures;
}

}  // namespace dtem
