#pragma once

#include "dtem/born_forward.hpp"
#include "dtem/fbp.hpp"
#include "dtem/projection_set.hpp"

namespace dtem {

// [K_theta(x, y) + K_{theta+pi}(-x, y)] / 2.
struct SymmetrizedContrast {
  RealField2 image;
  double theta = 0;
  double defocus = 0;
};

// Throws ErrorCode::mismatch unless grids and defocus agree and the angles
// differ by pi (mod 2 pi).
SymmetrizedContrast symmetrize(const ContrastImage& k_theta, const ContrastImage& k_theta_pi);

struct TieOptions {
  // Regulariser of the inverse Laplacian; negative selects the default
  // 1e-6 * 4 pi^2 q_max^2 of the image grid.
  double alpha = -1.0;
  // Zero padding added on each axis before the inversion, as a fraction of
  // the image size.
  double pad_fraction = 0.25;
  FbpOptions fbp;
};

double default_tie_alpha(const Grid2& g);

// phi = (2 pi / (lambda z)) inverse_laplacian(K~). Throws ErrorCode::domain
// when z == 0.
RealField2 tie_phase(const SymmetrizedContrast& ks, const Beam& b, const TieOptions& opts = {});

// Projected potential (V*A) from a phase map: (lambda E / pi) phi.
RealField2 phase_to_line_integral(const RealField2& phase, const Beam& b);

// symmetrize -> tie_phase -> fbp_reconstruct over a set holding every
// theta + pi partner at one nonzero defocus.
Volume3 tie_dt_pipeline(const ProjectionSet& ps, const Grid3& volume, const TieOptions& opts = {});

}  // namespace dtem
