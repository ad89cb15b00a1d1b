#include <cmath>

#include "doctest.h"
#include "dtem/dt_recon.hpp"
#include "dtem/simulate.hpp"
#include "dtem/tie_recon.hpp"
#include "test_support.hpp"

using namespace dtem;
using testing::kPi;

namespace {

const Beam kBeam = Beam::from_voltage(200e3);

ContrastImage contrast(RealField2 image, double theta, double z) {
  return ContrastImage{std::move(image), z, theta, ForwardModel::born};
}

// Zero-mean smooth phase: a Gaussian minus a wider one of equal integral.
RealField2 smooth_phase(const Grid2& g) {
  RealField2 phi(g);
  const double s1 = 1.5, s2 = 3.0;
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double r2 = std::pow(g.x(ix) - 0.7, 2) + std::pow(g.y(iy) + 0.4, 2);
      phi(ix, iy) = 0.05 * (std::exp(-r2 / (2 * s1 * s1)) - (s1 * s1) / (s2 * s2) * std::exp(-r2 / (2 * s2 * s2)));
    }
  return phi;
}

double site_peak(const Volume3& v, const Atom& a, const Phantom& p) {
  const Grid3& g = v.grid();
  const int ix = static_cast<int>(std::lround(a.position.x / g.dx())) + g.nx() / 2;
  const int iy = static_cast<int>(std::lround(a.position.y / g.dy())) + g.ny() / 2;
  const int iz = static_cast<int>(std::lround((a.position.z - p.center_z()) / g.dz())) + g.nz() / 2;
  double best = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const double val = v(ix + dx, iy + dy, iz + dz);
        if (std::abs(val) > std::abs(best)) best = val;
      }
  return best;
}

}  // namespace

TEST_CASE("symmetrized contrast") {
  const Grid2 g(32, 32, 0.5, 0.5);
  const RealField2 k = testing::random_field(g, 1);

  SUBCASE("mirror-equal pair returns the input") {
    const SymmetrizedContrast s = symmetrize(contrast(k, 0.3, 45), contrast(mirror_x(k), 0.3 + kPi, 45));
    CHECK(testing::max_abs_diff(s.image.values(), k.values()) < 1e-15);
    CHECK(s.theta == 0.3);
    CHECK(s.defocus == 45);
    const SymmetrizedContrast again =
        symmetrize(contrast(s.image, 0.3, 45), contrast(mirror_x(s.image), 0.3 + kPi, 45));
    CHECK(again.image.values() == s.image.values());
  }
  SUBCASE("antisymmetric pair cancels") {
    RealField2 neg = mirror_x(k);
    for (auto& v : neg.values()) v = -v;
    const SymmetrizedContrast s = symmetrize(contrast(k, 5.0, 45), contrast(neg, 5.0 - kPi, 45));
    CHECK(testing::max_abs(s.image.values()) == 0.0);
  }
  SUBCASE("in-focus Born pair cancels") {
    const Grid3 vol(g, 32, 0.5, -16.0);
    const Phantom p({Atom{{1.0, 0.5, -5.0}, 50, 0.8}, Atom{{-2.0, 1.0, -11.0}, 50, 0.8}}, -16.0);
    const RealField2 a = born_contrast(p, vol, kBeam, 0.4, 0.0).image;
    const RealField2 b = born_contrast(p, vol, kBeam, 0.4 + kPi, 0.0).image;
    const SymmetrizedContrast s = symmetrize(contrast(a, 0.4, 0), contrast(b, 0.4 + kPi, 0));
    CHECK(testing::max_abs(a.values()) > 1e-3);
    CHECK(testing::max_abs(s.image.values()) < 1e-12 * testing::max_abs(a.values()));
  }
  SUBCASE("zero-mean contrast stays zero mean") {
    const Grid3 vol(g, 32, 0.5, -16.0);
    const Phantom p({Atom{{1.0, 0.5, -5.0}, 50, 0.8}}, -16.0);
    const SymmetrizedContrast s = symmetrize(contrast(born_contrast(p, vol, kBeam, 0, 45).image, 0, 45),
                                             contrast(born_contrast(p, vol, kBeam, kPi, 45).image, kPi, 45));
    double sum = 0;
    for (double v : s.image.values()) sum += v;
    CHECK(std::abs(sum / s.image.size()) < 1e-10);
  }
  SUBCASE("metadata mismatch") {
    CHECK_THROWS_AS(symmetrize(contrast(k, 0, 45), contrast(k, 1.0, 45)), Error);
    CHECK_THROWS_AS(symmetrize(contrast(k, 0, 45), contrast(k, kPi, 40)), Error);
    CHECK_THROWS_AS(symmetrize(contrast(k, 0, 45), contrast(RealField2(Grid2(16, 16, 0.5, 0.5)), kPi, 45)), Error);
  }
}

TEST_CASE("TIE phase retrieval") {
  // Wide enough that the Laplacian of the wider Gaussian vanishes at the edges.
  const Grid2 g(128, 128, 0.5, 0.5);
  const RealField2 phi = smooth_phase(g);
  const double z = 20.0;

  SUBCASE("forward TIE round trip") {
    // I/I_in = 1 - (lambda z / 2 pi) lap(phi), so K = (lambda z / 2 pi) lap(phi).
    RealField2 k = laplacian_2d(phi);
    for (auto& v : k.values()) v *= kBeam.lambda() * z / (2 * kPi);
    for (double pad : {0.0, 0.25}) {
      TieOptions o;
      o.alpha = 0;
      o.pad_fraction = pad;
      const RealField2 back = tie_phase(SymmetrizedContrast{k, 0, z}, kBeam, o);
      CHECK(testing::rms_diff(back.values(), phi.values()) / testing::rms(phi.values()) < 1e-6);
    }
  }
  SUBCASE("zero contrast and zero defocus") {
    CHECK(testing::max_abs(tie_phase(SymmetrizedContrast{RealField2(g), 0, z}, kBeam).values()) == 0.0);
    CHECK_THROWS_AS(tie_phase(SymmetrizedContrast{RealField2(g), 0, 0.0}, kBeam), Error);
  }
  SUBCASE("defocus independence to first order") {
    // Thin-object contrast at z, retrieved by TIE, misses phi by O(z^2).
    TieOptions o;
    o.alpha = 0;
    o.pad_fraction = 0;
    auto err = [&](double dz) {
      const RealField2 k = forward_thin(phi, kBeam, dz).image;
      const RealField2 back = tie_phase(SymmetrizedContrast{k, 0, dz}, kBeam, o);
      return testing::rms_diff(back.values(), phi.values());
    };
    CHECK(std::log2(err(20.0) / err(10.0)) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(err(10.0) / testing::rms(phi.values()) < 0.02);
  }
  SUBCASE("default regulariser") {
    CHECK(default_tie_alpha(g) == doctest::Approx(1e-6 * 4 * kPi * kPi * 1.0).epsilon(1e-14));
    CHECK(default_tie_alpha(Grid2(16, 16, 0.25, 0.5)) == doctest::Approx(1e-6 * 4 * kPi * kPi * 1.0).epsilon(1e-14));
  }
  SUBCASE("line integrals") {
    const RealField2 v = phase_to_line_integral(phi, kBeam);
    for (std::size_t i = 0; i < g.size(); i += 97)
      CHECK(v[i] == doctest::Approx(kBeam.lambda() * kBeam.volts() / kPi * phi[i]).epsilon(1e-14));
  }
}

TEST_CASE("filtered back-projection") {
  SUBCASE("analytic Radon pair") {
    // V = exp(-(x^2 + u^2) / 2 s^2) has p(t) = s sqrt(2 pi) exp(-t^2 / 2 s^2) at every angle.
    const Grid3 vol(Grid2(128, 2, 0.25, 0.25), 128, 0.25, -32.0);
    const double s = 2.0;
    const auto angles = uniform_angles(1800);
    RealField2 p(vol.plane());
    for (int iy = 0; iy < 2; ++iy)
      for (int ix = 0; ix < 128; ++ix)
        p(ix, iy) = s * std::sqrt(2 * kPi) * std::exp(-std::pow(vol.plane().x(ix), 2) / (2 * s * s));
    const Volume3 v = fbp_reconstruct(std::vector<RealField2>(angles.size(), p), angles, vol);
    double e2 = 0, t2 = 0;
    for (int iz = 0; iz < 128; ++iz)
      for (int ix = 0; ix < 128; ++ix) {
        const double x = vol.plane().x(ix), u = vol.z_rel(iz);
        if (x * x + u * u > 12.0 * 12.0) continue;
        const double want = std::exp(-(x * x + u * u) / (2 * s * s));
        e2 += std::pow(v(ix, 0, iz) - want, 2);
        t2 += want * want;
      }
    CHECK(std::sqrt(e2 / t2) < 0.01);
  }
  SUBCASE("zero sinogram and bad angles") {
    const Grid3 vol(Grid2(16, 4, 0.5, 0.5), 16, 0.5, -8.0);
    const auto angles = uniform_angles(12);
    const std::vector<RealField2> zero(12, RealField2(vol.plane()));
    CHECK(testing::max_abs(fbp_reconstruct(zero, angles, vol).values()) == 0.0);
    auto bent = angles;
    bent[3] += 0.01;
    CHECK_THROWS_AS(fbp_reconstruct(zero, bent, vol), Error);
    CHECK_THROWS_AS(fbp_reconstruct(zero, uniform_angles(11), vol), Error);
  }
  SUBCASE("off-centre atom lands at its position") {
    const Grid3 vol(Grid2(64, 32, 0.5, 0.5), 64, 0.5, -32.0);
    const Phantom p({Atom{{5.0, 2.0, -16.0 - 7.0}, 50, 0.8}}, -32.0);
    const auto angles = uniform_angles(360);
    std::vector<RealField2> lines;
    for (double t : angles) lines.push_back(line_projection(p, vol.plane(), t));
    const Volume3 v = fbp_reconstruct(lines, angles, vol);
    std::size_t best = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] > v[best]) best = i;
    const int ix = static_cast<int>(best % 64), iy = static_cast<int>(best / 64 % 32), iz = static_cast<int>(best / (64 * 32));
    CHECK(std::abs(vol.plane().x(ix) - 5.0) <= 0.5);
    CHECK(std::abs(vol.plane().y(iy) - 2.0) <= 0.5);
    CHECK(std::abs(vol.z_rel(iz) + 7.0) <= 0.5);
    CHECK(v[best] == doctest::Approx(50.0).epsilon(0.1));
  }
  SUBCASE("rotating the angle labels rotates the volume") {
    const Grid3 vol(Grid2(32, 4, 0.5, 0.5), 32, 0.5, -16.0);
    const auto angles = uniform_angles(120);
    std::vector<RealField2> lines;
    for (std::size_t i = 0; i < angles.size(); ++i) lines.push_back(testing::random_field(vol.plane(), 100 + i));
    std::vector<RealField2> turned(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) turned[(i + 30) % lines.size()] = lines[i];
    const Volume3 a = fbp_reconstruct(lines, angles, vol);
    const Volume3 b = fbp_reconstruct(turned, angles, vol);
    // A quarter turn: b(x, u) = a(u, -x).
    double err = 0;
    for (int iz = 1; iz < 32; ++iz)
      for (int iy = 0; iy < 4; ++iy)
        for (int ix = 1; ix < 32; ++ix) err = std::max(err, std::abs(b(ix, iy, iz) - a(iz, iy, 32 - ix)));
    CHECK(err < 1e-9 * testing::max_abs(a.values()));
  }
  SUBCASE("thread count does not change a bit") {
    const Grid3 vol(Grid2(32, 8, 0.5, 0.5), 32, 0.5, -16.0);
    const auto angles = uniform_angles(60);
    std::vector<RealField2> lines;
    for (std::size_t i = 0; i < angles.size(); ++i) lines.push_back(testing::random_field(vol.plane(), 7 + i));
    FbpOptions one, four;
    one.threads = 1;
    four.threads = 4;
    four.filter = one.filter = FbpFilter::hann;
    CHECK(fbp_reconstruct(lines, angles, vol, one).values() == fbp_reconstruct(lines, angles, vol, four).values());
  }
}

TEST_CASE("TIE-DT pipeline") {
  const Grid3 g(Grid2(48, 48, 0.5, 0.5), 48, 0.5, -24.0);
  const Phantom p({Atom{{3.0, 1.0, -8.0}, 50, 0.8}, Atom{{-4.0, -2.0, -14.0}, 50, 0.8},
                   Atom{{1.0, 3.5, -17.0}, 50, 0.8}, Atom{{-1.0, -4.0, -9.5}, 50, 0.8},
                   Atom{{0.0, 0.0, -12.5}, 50, 0.8}},
                  -24.0);
  const Volume3 truth = potential_on_grid(p, g);
  double peak = 0;
  for (double v : truth.values()) peak = std::max(peak, v);

  SUBCASE("Born data") {
    const ProjectionSet ps = simulate_projection_set(p, g, kBeam, ForwardModel::born, uniform_angles(360), 45.0);
    const Volume3 v = tie_dt_pipeline(ps, g);
    CHECK(testing::correlation(v.values(), truth.values()) >= 0.95);
    for (const Atom& a : p.atoms()) CHECK(site_peak(v, a, p) > 0);
  }
  SUBCASE("agrees with full DT at small defocus") {
    const ProjectionSet ps = simulate_projection_set(p, g, kBeam, ForwardModel::born, uniform_angles(180), 10.0);
    DtOptions o;
    o.eps = 0.01;
    const Volume3 tie = tie_dt_pipeline(ps, g);
    const Volume3 dt = dt_reconstruct(ps, g, o).volume;
    CHECK(testing::rms_diff(tie.values(), dt.values()) / peak < 0.05);
  }
  SUBCASE("empty projections and gaps") {
    ProjectionSet ps;
    ps.grid = g.plane();
    ps.beam = kBeam;
    ps.defocus = 45.0;
    ps.angles = uniform_angles(8);
    ps.images.assign(8, RealField2(g.plane()));
    CHECK(testing::max_abs(tie_dt_pipeline(ps, g).values()) == 0.0);
    ps.angles.pop_back();
    ps.images.pop_back();
    CHECK_THROWS_WITH_AS(tie_dt_pipeline(ps, g), doctest::Contains("lack a theta + pi partner"), Error);
  }
}

TEST_CASE("TIE is the small-defocus limit of the paraboloid solution") {
  // For an object symmetric in depth the two differ by (1 - sinc(a z)) at
  // matched frequencies, a = pi lambda q^2: quadratic in z. The symmetry is
  // along the beam, so the view is theta = 0.
  const Grid3 g(Grid2(64, 64, 0.5, 0.5), 64, 0.5, -32.0);
  const Phantom p({Atom{{2.0, 1.0, -16.0 - 6.0}, 50, 0.8}, Atom{{2.0, 1.0, -16.0 + 6.0}, 50, 0.8},
                   Atom{{-3.0, -1.5, -16.0}, 50, 0.8}},
                  -32.0);
  const Grid2& pl = g.plane();
  const std::vector<double> zs{5.0, 10.0, 20.0, 40.0};
  auto usable = [&](int kx, int ky) {
    if (pl.is_nyquist(kx, ky) || pl.q2(kx, ky) == 0) return false;
    for (double z : zs)
      if (std::abs(std::sin(2 * kPi * kBeam.lambda() * z * pl.q2(kx, ky))) <= 0.1) return false;
    return true;
  };
  TieOptions o;
  o.alpha = 0;
  o.pad_fraction = 0;
  std::vector<double> gaps;
  for (double z : zs) {
    const ContrastImage k = born_contrast(p, g, kBeam, 0.0, z);
    const ContrastImage kpi = born_contrast(p, g, kBeam, kPi, z);
    const ComplexField2 ks = fft2_forward(k.image), kpis = fft2_forward(kpi.image);
    const ComplexField2 tie = fft2_forward(phase_to_line_integral(tie_phase(symmetrize(k, kpi), kBeam, o), kBeam));
    double sum = 0;
    for (int ky = 0; ky < pl.ny(); ++ky)
      for (int kx = 0; kx < pl.nx(); ++kx) {
        if (!usable(kx, ky)) continue;
        const cplx dt = solve_paraboloid_sample(ks(kx, ky), kpis(pl.mirror_x(kx), ky), std::sqrt(pl.q2(kx, ky)), z, kBeam, 0);
        sum += std::norm(tie(kx, ky) - dt);
      }
    gaps.push_back(std::sqrt(sum));
  }
  const double slope = std::log2(gaps.back() / gaps.front()) / 3.0;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.15));
}
