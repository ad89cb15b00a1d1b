#include <cmath>
#include <random>

#include "doctest.h"
#include "dtem/born_forward.hpp"
#include "dtem/propagation.hpp"
#include "test_support.hpp"

using namespace dtem;
using testing::kPi;

namespace {

const Beam kBeam = Beam::from_voltage(200e3);

Wavefield random_wave(const Grid2& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Wavefield w = plane_wave(g, kBeam, 0.0);
  for (auto& v : w.field.values()) v = cplx(1.0 + 0.2 * n(rng), 0.2 * n(rng));
  return w;
}

double mean_intensity(const Wavefield& w) {
  double s = 0;
  for (auto v : w.field.values()) s += std::norm(v);
  return s / w.field.size();
}

}  // namespace

TEST_CASE("free-space propagation") {
  const Grid2 g(64, 64, 0.25, 0.25);
  SUBCASE("distance zero and plane waves") {
    const Wavefield w = random_wave(g, 1);
    const Wavefield same = propagate(w, 0.0);
    CHECK(testing::max_abs_diff(same.field.values(), w.field.values()) == 0.0);
    const Wavefield pw = propagate(plane_wave(g, kBeam, 0.0), 123.0);
    CHECK(testing::max_abs_diff(pw.field.values(), plane_wave(g, kBeam, 0.0).field.values()) < 1e-14);
    CHECK(pw.z == 123.0);
  }
  SUBCASE("group property and unitarity") {
    const Wavefield w = random_wave(g, 2);
    const Wavefield back = propagate(propagate(w, 77.0), -77.0);
    CHECK(testing::max_abs_diff(back.field.values(), w.field.values()) < 1e-12);
    const Wavefield two = propagate(propagate(w, 30.0), 50.0);
    const Wavefield one = propagate(w, 80.0);
    CHECK(testing::max_abs_diff(two.field.values(), one.field.values()) < 1e-12);
    CHECK(mean_intensity(one) == doctest::Approx(mean_intensity(w)).epsilon(1e-12));
    const Wavefield exact = propagate(w, 80.0, PropagatorKind::exact);
    CHECK(mean_intensity(exact) == doctest::Approx(mean_intensity(w)).epsilon(1e-12));
  }
  SUBCASE("Gaussian beam") {
    // u0 = exp(-r^2 / w0^2) propagates to (pi w0^2 / c) exp(-pi r^2 / c) with
    // c = pi w0^2 + i lambda d under the exp(-i pi lambda d q^2) kernel.
    const Grid2 big(128, 128, 0.25, 0.25);
    const double w0 = 2.0, d = 500.0;
    Wavefield w = plane_wave(big, kBeam, 0.0);
    for (int iy = 0; iy < big.ny(); ++iy)
      for (int ix = 0; ix < big.nx(); ++ix) {
        const double r2 = big.x(ix) * big.x(ix) + big.y(iy) * big.y(iy);
        w.field(ix, iy) = std::exp(-r2 / (w0 * w0));
      }
    const Wavefield out = propagate(w, d);
    const cplx c(kPi * w0 * w0, kBeam.lambda() * d);
    double err = 0;
    for (int iy = 0; iy < big.ny(); ++iy)
      for (int ix = 0; ix < big.nx(); ++ix) {
        const double r2 = big.x(ix) * big.x(ix) + big.y(iy) * big.y(iy);
        const cplx expect = kPi * w0 * w0 / c * std::exp(-kPi * r2 / c);
        err = std::max(err, std::abs(std::norm(out.field(ix, iy)) - std::norm(expect)));
      }
    CHECK(err < 1e-4);
    // The intensity width grows as sqrt(1 + (lambda d / (pi w0^2))^2).
    const double growth = std::sqrt(1 + std::pow(kBeam.lambda() * d / (kPi * w0 * w0), 2));
    CHECK(std::norm(out.field(64, 64)) == doctest::Approx(1.0 / (growth * growth)).epsilon(1e-8));
  }
  SUBCASE("refocus") {
    Wavefield w = random_wave(g, 3);
    w.z = -10.0;
    const Wavefield same = refocus(w, -10.0);
    CHECK(testing::max_abs_diff(same.field.values(), w.field.values()) == 0.0);
    const Wavefield chained = refocus(refocus(w, 12.0), 40.0);
    const Wavefield direct = refocus(w, 40.0);
    CHECK(direct.z == 40.0);
    CHECK(testing::max_abs_diff(chained.field.values(), direct.field.values()) < 1e-12);
  }
}

TEST_CASE("phase gratings") {
  const Grid2 g(32, 32, 0.5, 0.5);
  const Wavefield w = random_wave(g, 4);
  const Wavefield same = phase_grating(w, RealField2(g));
  CHECK(testing::max_abs_diff(same.field.values(), w.field.values()) == 0.0);

  const double c = 300.0;
  const Wavefield shifted = phase_grating(w, RealField2(g, c));
  const cplx factor = std::polar(1.0, kBeam.interaction() * c);
  for (std::size_t i = 0; i < w.field.size(); ++i) CHECK(std::abs(shifted.field[i] - w.field[i] * factor) < 1e-12);

  RealField2 slice = testing::random_field(g, 9);
  for (auto& v : slice.values()) v *= 200.0;
  RealField2 half(g);
  for (std::size_t i = 0; i < g.size(); ++i) half[i] = 0.5 * slice[i];
  const Wavefield twice = phase_grating(phase_grating(w, half), half);
  const Wavefield once = phase_grating(w, slice);
  CHECK(testing::max_abs_diff(twice.field.values(), once.field.values()) < 1e-12);

  CHECK_THROWS_AS(phase_grating(w, RealField2(Grid2(16, 16, 0.5, 0.5))), Error);
}

TEST_CASE("multislice") {
  const Grid3 g(Grid2(64, 64, 0.25, 0.25), 40, 0.5, -20.0);
  SUBCASE("empty phantom") {
    const Wavefield w = multislice(Phantom({}, -20.0), g, kBeam, 0.3, 45.0);
    for (auto v : w.field.values()) CHECK(std::norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.z == doctest::Approx(-10.0 + 45.0));
  }
  SUBCASE("energy conservation") {
    const Phantom p({Atom{{0.5, 0, -8.0}, 80, 0.8}, Atom{{-1.5, 1.0, -13.0}, 80, 0.8}}, -20.0);
    const Wavefield w = multislice(p, g, kBeam, 0.7, 45.0);
    CHECK(std::abs(mean_intensity(w) - 1.0) < 1e-6);
  }
  SUBCASE("slice phase limit") {
    const Phantom heavy({Atom{{0, 0, -10.0}, 5000, 0.8}}, -20.0);
    CHECK_THROWS_WITH_AS(multislice(heavy, g, kBeam, 0.0, 10.0), doctest::Contains("dz <="), Error);
  }
  SUBCASE("weak atom agrees with the Born model to first order") {
    // K_ms - K_born is dominated by the O(V0^2) term: halving V0 quarters it.
    MultisliceOptions opts;
    opts.bandlimit = false;
    const Grid3 fine(Grid2(64, 64, 0.25, 0.25), 160, 0.125, -20.0);
    auto discrepancy = [&](double v0) {
      const Phantom p({Atom{{0.3, -0.2, -6.0}, v0, 0.8}}, -20.0);
      const auto ms = multislice_contrast(p, fine, kBeam, 0.0, 30.0, opts);
      const auto born = born_contrast(p, fine, kBeam, 0.0, 30.0);
      return testing::rms_diff(ms.image.values(), born.image.values());
    };
    const double e1 = discrepancy(200.0), e2 = discrepancy(100.0);
    const double exponent = std::log2(e1 / e2);
    CHECK(exponent == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("projection exit wave") {
  // The field of view keeps every atom 8 sigma clear of the unpaired x = -L/2 column.
  const Grid3 g(Grid2(128, 64, 0.25, 0.25), 40, 0.5, -20.0);
  const Phantom p({Atom{{1.5, 0, -8.0}, 50, 0.8}, Atom{{-1.5, 1.0, -14.0}, 50, 0.8}}, -20.0);
  const Wavefield empty = projection_exit_wave(Phantom({}, -20.0), g, kBeam, 0.0);
  for (auto v : empty.field.values()) CHECK(v == cplx(1.0, 0.0));
  const Wavefield w = projection_exit_wave(p, g, kBeam, 0.4);
  for (auto v : w.field.values()) CHECK(std::norm(v) == doctest::Approx(1.0).epsilon(1e-14));
  const RealField2 i0 = intensity_contrast(propagate(projection_exit_wave(p, g, kBeam, 0.4), 45.0));
  const RealField2 i1 = mirror_x(intensity_contrast(propagate(projection_exit_wave(p, g, kBeam, 0.4 + kPi), 45.0)));
  CHECK(testing::max_abs_diff(i0.values(), i1.values()) < 1e-12);
}

TEST_CASE("opposite orientations differ under multislice only") {
  const Grid3 g(Grid2(64, 64, 0.25, 0.25), 120, 0.5, -60.0);
  const Phantom p({Atom{{2.0, 0, -15.0}, 50, 0.8}, Atom{{-2.0, 0, -45.0}, 50, 0.8}}, -60.0);
  auto mirror_rms = [&](ForwardModel model) {
    const auto f = [&](double theta) {
      return model == ForwardModel::multislice ? multislice_contrast(p, g, kBeam, theta, 45.0).image
                                               : projection_contrast(p, g, kBeam, theta, 45.0).image;
    };
    const RealField2 a = f(0.0), b = mirror_x(f(kPi));
    return testing::rms_diff(a.values(), b.values()) / testing::rms(a.values());
  };
  const double proj = mirror_rms(ForwardModel::projection);
  const double ms = mirror_rms(ForwardModel::multislice);
  CHECK(proj < 1e-10);
  CHECK(ms > 10 * proj);
  CHECK(ms > 0.05);
}
