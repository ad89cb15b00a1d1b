#pragma once

#include "dtem/grid.hpp"
#include "dtem/numerics.hpp"
#include "dtem/phantom.hpp"

namespace dtem {

// Complex amplitude on a transverse plane. `z` is the absolute axial
// coordinate of that plane in the frame of the (rotated) phantom, where the
// slab exit face is z = 0.
struct Wavefield {
  ComplexField2 field;
  Beam beam;
  double z = 0;
};

enum class PropagatorKind {
  paraxial,  // exp(-i pi lambda d q^2)
  exact,     // exp(i 2 pi d (sqrt(1/lambda^2 - q^2) - 1/lambda)), evanescent part dropped
};

Wavefield plane_wave(const Grid2& g, const Beam& b, double z);

// Free-space propagation by `distance` (A, may be negative). The paraxial
// kernel sign is fixed so that a weak phase object seen at distance z > 0
// shows intensity spectrum delta + 2 sin(pi lambda z q^2) phi_hat.
Wavefield propagate(const Wavefield& w, double distance, PropagatorKind kind = PropagatorKind::paraxial);

// Transmission through a slice with projected potential `slice` (V*A).
Wavefield phase_grating(const Wavefield& w, const RealField2& slice);

// Propagates to the absolute plane `to_plane`; the usual way to undo defocus
// on a complex exit wave.
Wavefield refocus(const Wavefield& w, double to_plane);

// 1 - I / I_in.
RealField2 intensity_contrast(const Wavefield& w);

struct MultisliceOptions {
  // Circular aperture at 2/3 of Nyquist applied in every propagation step.
  bool bandlimit = true;
  PropagatorKind propagator = PropagatorKind::paraxial;
  // Largest phase (rad) any single slice may impose.
  double max_slice_phase = 0.5;
};

// Phase-grating multislice through the phantom rotated by theta, slices of
// thickness ~g.dz() (the slab is split into round(|z0|/dz) equal slices).
// Each grating sits at its slice mid-plane; the two edge slices also carry
// the Gaussian tails beyond the slab faces. The returned wave lies on the
// plane `defocus` downstream of the rotation-centre plane.
Wavefield multislice(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                     const MultisliceOptions& opts = {});

// exp(i phi) with phi the straight-line projected phase of the rotated
// phantom, lodged on the rotation-centre plane (no propagation inside the
// object).
Wavefield projection_exit_wave(const Phantom& p, const Grid3& g, const Beam& b, double theta);

}  // namespace dtem
