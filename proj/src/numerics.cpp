#include "dtem/numerics.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace dtem {

namespace {

// CODATA 2018 exact / recommended values.
constexpr double kPlanck = 6.62607015e-34;
constexpr double kElectronMass = 9.1093837015e-31;
constexpr double kElementaryCharge = 1.602176634e-19;
constexpr double kSpeedOfLight = 299792458.0;

}  // namespace

double electron_wavelength(double volts) {
  if (!(volts > 0) || !std::isfinite(volts)) {
    std::ostringstream os;
    os << "accelerating voltage must be positive, got " << volts;
    fail(ErrorCode::domain, os.str());
  }
  const double eE = kElementaryCharge * volts;
  const double mc2 = kElectronMass * kSpeedOfLight * kSpeedOfLight;
  const double p = std::sqrt(2.0 * kElectronMass * eE * (1.0 + eE / (2.0 * mc2)));
  return kPlanck / p * 1e10;
}

Beam::Beam(double volts, double lambda, double intensity) : volts_(volts), lambda_(lambda), intensity_(intensity) {
  const double expected = electron_wavelength(volts);
  if (!(lambda > 0) || std::abs(lambda - expected) > 1e-3 * expected) {
    std::ostringstream os;
    os << "wavelength " << lambda << " A inconsistent with " << volts << " V (expected " << expected << " A)";
    fail(ErrorCode::invalid_argument, os.str());
  }
  require(intensity > 0, ErrorCode::invalid_argument, "incident intensity must be positive");
}

Beam Beam::from_voltage(double volts, double intensity) {
  return Beam(volts, electron_wavelength(volts), intensity);
}

double Beam::interaction() const { return std::numbers::pi / (lambda_ * volts_); }

double fresnel_number(double a, double lambda, double thickness) {
  if (!(a > 0) || !(lambda > 0) || !(thickness > 0))
    fail(ErrorCode::domain, "fresnel_number arguments must be positive");
  return a * a / (lambda * thickness);
}

namespace fft {

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  // dims in FFTW order (slowest first); unused trailing dims are 0.
  fftw_plan get(std::array<int, 3> dims, int rank, int sign) {
    const auto key = std::make_tuple(dims[0], dims[1], dims[2], sign);
    std::lock_guard lock(mutex);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    std::size_t total = 1;
    for (int i = 0; i < rank; ++i) total *= static_cast<std::size_t>(dims[i]);
    auto* scratch = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(rank, dims.data(), scratch, scratch, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan) fail(ErrorCode::internal, "FFTW plan creation failed");
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(fftw_plan plan, std::span<cplx> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void transform_1d(std::span<cplx> data, int n, int sign) {
  require(data.size() == static_cast<std::size_t>(n), ErrorCode::internal, "fft length mismatch");
  run(cache().get({n, 0, 0}, 1, sign), data);
}

void transform_2d(std::span<cplx> data, int nx, int ny, int sign) {
  require(data.size() == static_cast<std::size_t>(nx) * ny, ErrorCode::internal, "fft size mismatch");
  run(cache().get({ny, nx, 0}, 2, sign), data);
}

void transform_3d(std::span<cplx> data, int nx, int ny, int nz, int sign) {
  require(data.size() == static_cast<std::size_t>(nx) * ny * nz, ErrorCode::internal, "fft size mismatch");
  run(cache().get({nz, ny, nx}, 3, sign), data);
}

}  // namespace fft

namespace {

// (-1)^(kx+ky[+kz]) moves the real-space origin from index 0 to index n/2.
inline double checker(int a, int b, int c = 0) { return ((a + b + c) & 1) ? -1.0 : 1.0; }

}  // namespace

ComplexField2 fft2_forward(const ComplexField2& f) {
  const Grid2& g = f.grid();
  ComplexField2 out = f;
  fft::transform_2d(out.data(), g.nx(), g.ny(), -1);
  const double area = g.dx() * g.dy();
  for (int ky = 0; ky < g.ny(); ++ky)
    for (int kx = 0; kx < g.nx(); ++kx) out(kx, ky) *= area * checker(kx, ky);
  return out;
}

ComplexField2 fft2_forward(const RealField2& f) { return fft2_forward(to_complex(f)); }

ComplexField2 fft2_inverse(const ComplexField2& spectrum) {
  const Grid2& g = spectrum.grid();
  ComplexField2 out = spectrum;
  const double dq = g.dqx() * g.dqy();
  for (int ky = 0; ky < g.ny(); ++ky)
    for (int kx = 0; kx < g.nx(); ++kx) out(kx, ky) *= dq * checker(kx, ky);
  fft::transform_2d(out.data(), g.nx(), g.ny(), +1);
  return out;
}

ComplexVolume3 fft3_forward(const ComplexVolume3& v) {
  const Grid3& g = v.grid();
  ComplexVolume3 out = v;
  fft::transform_3d(out.data(), g.nx(), g.ny(), g.nz(), -1);
  const double vol = g.dx() * g.dy() * g.dz();
  for (int kz = 0; kz < g.nz(); ++kz)
    for (int ky = 0; ky < g.ny(); ++ky)
      for (int kx = 0; kx < g.nx(); ++kx) out(kx, ky, kz) *= vol * checker(kx, ky, kz);
  return out;
}

ComplexVolume3 fft3_forward(const Volume3& v) {
  ComplexVolume3 c(v.grid());
  for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i];
  return fft3_forward(c);
}

ComplexVolume3 fft3_inverse(const ComplexVolume3& spectrum) {
  const Grid3& g = spectrum.grid();
  ComplexVolume3 out = spectrum;
  const double dq = g.plane().dqx() * g.plane().dqy() * g.dqz();
  for (int kz = 0; kz < g.nz(); ++kz)
    for (int ky = 0; ky < g.ny(); ++ky)
      for (int kx = 0; kx < g.nx(); ++kx) out(kx, ky, kz) *= dq * checker(kx, ky, kz);
  fft::transform_3d(out.data(), g.nx(), g.ny(), g.nz(), +1);
  return out;
}

namespace {

template <typename Filter>
RealField2 spectral_filter(const RealField2& f, Filter&& filter) {
  const Grid2& g = f.grid();
  ComplexField2 spec = fft2_forward(f);
  for (int ky = 0; ky < g.ny(); ++ky)
    for (int kx = 0; kx < g.nx(); ++kx) spec(kx, ky) *= filter(g.q2(kx, ky));
  return real_part(fft2_inverse(spec));
}

}  // namespace

RealField2 inverse_laplacian_2d(const RealField2& f, double alpha) {
  require(alpha >= 0, ErrorCode::domain, "inverse Laplacian regulariser must be >= 0");
  constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  return spectral_filter(f, [alpha](double q2) { return q2 == 0.0 ? 0.0 : -1.0 / (four_pi2 * q2 + alpha); });
}

RealField2 laplacian_2d(const RealField2& f) {
  constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  return spectral_filter(f, [](double q2) { return -four_pi2 * q2; });
}

}  // namespace dtem
