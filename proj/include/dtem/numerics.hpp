#pragma once

#include <span>

#include "dtem/grid.hpp"

namespace dtem {

// Relativistic de Broglie wavelength in angstrom for an accelerating voltage
// in volts. Throws ErrorCode::domain for non-positive voltages.
double electron_wavelength(double volts);

// Monochromatic plane-wave illumination. The wave number convention is
// k = 1/lambda (no 2*pi).
class Beam {
 public:
  Beam() = default;
  // lambda must agree with the relativistic wavelength of `volts` to 0.1%.
  Beam(double volts, double lambda, double intensity = 1.0);
  static Beam from_voltage(double volts, double intensity = 1.0);

  double volts() const { return volts_; }
  double lambda() const { return lambda_; }
  double intensity() const { return intensity_; }
  double wave_number() const { return 1.0 / lambda_; }
  // Multiplier turning a projected potential (V*A) into a phase (rad).
  double interaction() const;

  bool operator==(const Beam&) const = default;

 private:
  double volts_ = 0, lambda_ = 0, intensity_ = 1;
};

// a^2 / (lambda * thickness). Values well above 1 mean the projection
// approximation holds at feature size a.
double fresnel_number(double a, double lambda, double thickness);

// Discrete approximations of the continuous transform
//   F(q) = integral exp(-i 2 pi q.r) f(r) dr
// on the centred sampling of Grid2/Grid3: DFT times the pixel area (volume),
// with the phase correction for the origin sitting at index n/2. The inverse
// carries the matching dq factor, so inverse(forward(f)) == f.
ComplexField2 fft2_forward(const ComplexField2& f);
ComplexField2 fft2_forward(const RealField2& f);
ComplexField2 fft2_inverse(const ComplexField2& spectrum);
ComplexVolume3 fft3_forward(const ComplexVolume3& v);
ComplexVolume3 fft3_forward(const Volume3& v);
ComplexVolume3 fft3_inverse(const ComplexVolume3& spectrum);

// Applies -1/(4 pi^2 q^2 + alpha) in Fourier space. The q = 0 output is
// always zero, so alpha = 0 is allowed.
RealField2 inverse_laplacian_2d(const RealField2& f, double alpha);
// Forward transverse Laplacian, spectral.
RealField2 laplacian_2d(const RealField2& f);

namespace fft {

// Unnormalised in-place complex DFTs on row-major arrays (last dim fastest).
// sign = -1 forward, +1 backward. Thread-safe; plans are cached.
void transform_1d(std::span<cplx> data, int n, int sign);
void transform_2d(std::span<cplx> data, int nx, int ny, int sign);
void transform_3d(std::span<cplx> data, int nx, int ny, int nz, int sign);

}  // namespace fft

}  // namespace dtem
