#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dtem/grid.hpp"
#include "dtem/numerics.hpp"
#include "dtem/phantom.hpp"
#include "dtem/propagation.hpp"

namespace dtem {

// Which model produced an image. `phase` images hold projected phase (rad)
// rather than contrast; `multislice_ctf` images are multislice waves
// refocused onto the rotation-centre plane.
enum class ForwardModel { projection, born, sliced, multislice, per_atom, multislice_ctf, phase };

std::string_view forward_model_name(ForwardModel m);
std::optional<ForwardModel> parse_forward_model(std::string_view name);

// K = 1 - I/I_in at `defocus` downstream of the rotation-centre plane.
struct ContrastImage {
  RealField2 image;
  double defocus = 0;
  double theta = 0;
  ForwardModel model = ForwardModel::born;
};

// The weak-phase intensity spectrum reads I_hat/I_in = delta + 2 sin(chi) phi_hat;
// with K = 1 - I/I_in every Born-type generator therefore carries this sign.
inline constexpr double kContrastSign = -1.0;

// Phase maps above this (rad) leave the weak-phase regime; forward_thin warns.
inline constexpr double kWeakPhaseLimit = 0.5;

// Thin weak phase object seen at `distance` downstream:
// K_hat = -2 sin(pi lambda distance q^2) phi_hat.
ContrastImage forward_thin(const RealField2& phase, const Beam& b, double distance);

enum class SliceReference {
  lower_edge,  // slice m referenced at its upstream face z_m
  midpoint,    // slice m referenced at z_m + dz/2
};

// Incoherent sum over `slices` equal slices of the rotated slab, each slice's
// projected phase computed exactly (edge slices absorb the Gaussian tails).
ContrastImage sliced_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                              int slices, SliceReference ref = SliceReference::lower_edge);

// Continuum limit of the slice sum, evaluated per atom in closed form:
// integral of exp(-(z'-z_a)^2/2s^2) sin(a (z - z')) dz'
//   = s sqrt(2 pi) exp(-a^2 s^2 / 2) sin(a (z - z_a)),  a = pi lambda q^2.
ContrastImage born_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus);

// Same quantity by Gauss-Legendre quadrature over z' (cross-check only).
ContrastImage born_contrast_quadrature(const Phantom& p, const Grid3& g, const Beam& b, double theta,
                                       double defocus, int nodes_per_sigma = 8);

ContrastImage multislice_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                                  const MultisliceOptions& opts = {});

// Projection approximation: exp(i phi) on the centre plane, propagated to the
// image plane.
ContrastImage projection_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus);

// Sum of single-atom multislice contrasts: keeps in-object diffraction, drops
// atom-to-atom multiple scattering.
ContrastImage per_atom_composite(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                                 const MultisliceOptions& opts = {});

}  // namespace dtem
