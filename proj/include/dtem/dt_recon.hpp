#pragma once

#include <cstdint>
#include <vector>

#include "dtem/grid.hpp"
#include "dtem/numerics.hpp"
#include "dtem/phantom.hpp"
#include "dtem/projection_set.hpp"

namespace dtem {

struct DtOptions {
  // Tikhonov parameter against |sin(2 pi lambda z q^2)| <= 1.
  double eps = 0.1;
  // Samples and reciprocal voxels beyond this fraction of Nyquist are dropped.
  double band_fraction = 0.9;
  // Reciprocal grid oversampling. Images are zero padded by the same factor
  // so their spectra land on the finer pitch; costs factor^3 memory.
  int oversample = 2;
  // invert_to_volume refuses to run below this covered fraction of the ball.
  double min_coverage = 0.5;
  int threads = 0;
  // Angles processed per deterministic batch.
  int batch = 16;
};

// Value of (F3 V)(q, -lambda q^2 / 2) in the beam frame from the defocused
// contrast spectra of one orientation and its 180-degree partner, the latter
// already mirrored to (-q_x, q_y):
//   -(lambda E / 2 pi) [e^{-ia} K + e^{ia} K_pi] s / (s^2 + eps^2),
//   a = pi lambda z q^2, s = sin(2a).
// Throws ErrorCode::domain when z == 0.
cplx solve_paraboloid_sample(cplx k_spec, cplx kpi_spec_mirrored, double q_perp, double z, const Beam& b,
                             double eps);

// Reciprocal-space sample (object frame) of one orientation:
//   q_obj = R_theta^T (q_x, q_y, -lambda q^2 / 2).
Vec3 paraboloid_point(double qx, double qy, double theta, double lambda);

// Least-squares gridding of paraboloid samples. Each sample carries a
// numerator N and a sensitivity s (value = N / s) and is spread with
// trilinear weights t; a voxel finalises to
//   sum(t s N) / (sum(t s^2) + eps^2 sum(t)),
// which reduces to the regularised single-sample solution for one sample.
// Voxels no sample touched stay exactly zero and are uncovered.
class ParaboloidAccumulator {
 public:
  ParaboloidAccumulator(const Grid3& volume, const Beam& beam, const DtOptions& opts = {});

  const Grid3& volume_grid() const { return volume_; }
  const Beam& beam() const { return beam_; }
  const DtOptions& options() const { return opts_; }
  int n(int axis) const { return dims_[axis]; }
  double dq(int axis) const { return dq_[axis]; }
  double band_limit() const { return band_; }

  // Spectra (fft2_forward) of K_theta and K_{theta+pi}; the second is
  // mirrored here. Image spectra sampled on a coarser pitch than the
  // accumulator leave gaps, so pad images by n(axis) / image size first.
  void add_pair(const ComplexField2& k_spec, const ComplexField2& kpi_spec, double theta, double defocus);
  // Several pairs at once; results are independent of opts.threads.
  struct PairRef {
    const ComplexField2* k_spec;
    const ComplexField2* kpi_spec;
    double theta;
    double defocus;
  };
  void add_pairs(const std::vector<PairRef>& pairs);

  // Direct deposit of a known value at an object-frame frequency (s = 1).
  void deposit(const Vec3& q, cplx value);

  // Finalised value and weight at a reciprocal node (wrap-around indices).
  cplx value(int kx, int ky, int kz) const;
  double weight(int kx, int ky, int kz) const;
  bool covered(int kx, int ky, int kz) const { return weight(kx, ky, kz) > 0; }
  // Covered fraction of the nodes inside the band-limited ball.
  double coverage() const;
  // One byte per reciprocal node (1 = covered), x fastest.
  std::vector<std::uint8_t> coverage_mask() const;

 private:
  struct Sample {
    Vec3 q;
    cplx numerator;
    double s;
  };
  std::size_t node(int kx, int ky, int kz) const {
    return (static_cast<std::size_t>(kz) * dims_[1] + ky) * dims_[0] + kx;
  }
  void collect(const PairRef& pair, std::vector<Sample>& out) const;
  void spread(const std::vector<std::vector<Sample>>& batches);

  Grid3 volume_;
  Beam beam_;
  DtOptions opts_;
  int dims_[3];
  double dq_[3];
  double band_;
  std::vector<cplx> num_;
  std::vector<double> den_, wsum_;
};

struct DtResult {
  Volume3 volume;
  double coverage = 0;
  // RMS(imaginary part) / RMS(real part) of the inverse transform.
  double imaginary_residual = 0;
  std::vector<std::uint8_t> coverage_mask;
  int mask_dims[3] = {0, 0, 0};
};

// Finalises the grid, inverse transforms and crops to the volume grid.
// Throws ErrorCode::coverage below opts.min_coverage.
DtResult invert_to_volume(const ParaboloidAccumulator& acc);

// Full diffraction-tomography reconstruction of one or more projection sets
// (each at its own defocus, all angles paired with theta + pi). `volume`
// gives the output sampling; voxel z is relative to the rotation centre.
DtResult dt_reconstruct(const std::vector<const ProjectionSet*>& sets, const Grid3& volume,
                        const DtOptions& opts = {});
DtResult dt_reconstruct(const ProjectionSet& set, const Grid3& volume, const DtOptions& opts = {});

}  // namespace dtem
