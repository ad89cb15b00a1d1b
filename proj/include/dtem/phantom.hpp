#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dtem/grid.hpp"

namespace dtem {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

// Isotropic Gaussian blob V(r) = amplitude * exp(-|r - position|^2 / (2 width^2)).
// Position in angstrom, amplitude in volts, width in angstrom.
struct Atom {
  Vec3 position;
  double amplitude = 50.0;
  double width = 0.8;
};

// Sparse electrostatic potential confined to the slab [z0, 0]. Every atom
// keeps a 3-sigma margin from both slab faces. The rotation axis is the line
// x = 0, z = z0/2 parallel to y.
class Phantom {
 public:
  static constexpr double kMarginSigmas = 3.0;

  Phantom() = default;
  Phantom(std::vector<Atom> atoms, double z0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double z0() const { return z0_; }
  double thickness() const { return -z0_; }
  double center_z() const { return 0.5 * z0_; }
  bool empty() const { return atoms_.empty(); }
  // Largest distance of an atom (plus margin) from the rotation axis; a
  // phantom rotates without changing its slab when this is <= |z0|/2.
  double rotation_radius() const;
  // Sum of V0 (2 pi sigma^2)^{3/2}: the integral of V over space.
  double total_integral() const;

 private:
  std::vector<Atom> atoms_;
  double z0_ = -1.0;
};

// V sampled at the voxel centres of g. Axial voxel k sits at z_rel(k) from
// the phantom's rotation centre, matching the reconstruction volumes.
// Throws if an atom centre lies outside the grid.
Volume3 potential_on_grid(const Phantom& p, const Grid3& g);

// Closed-form 3D transform with the origin at the rotation centre
// (0, 0, z0/2), kernel exp(-i 2 pi q.r).
cplx analytic_ft3(const Phantom& p, const Vec3& q);

// Rotation by theta about +y (right handed: x' = x cos + u sin, u' = -x sin
// + u cos, u = z - z0/2). The slab keeps its centre-relative geometry; if a
// rotated atom no longer fits, the slab grows symmetrically and is shifted so
// that the exit plane stays at z = 0.
Phantom rotate_y(const Phantom& p, double theta);

// Integral of V along z for the phantom rotated by theta (V*A).
RealField2 line_projection(const Phantom& p, const Grid2& g, double theta);
// Integral of V over z in [z_lo, z_hi] (absolute, unrotated phantom). Use
// -inf / +inf to absorb the Gaussian tails.
RealField2 slab_projection(const Phantom& p, const Grid2& g, double z_lo, double z_hi);
// Peak (on-axis) value of one atom's projection through [z_lo, z_hi]:
// V0 * integral of exp(-(z - z_atom)^2 / (2 sigma^2)) over the interval.
double atom_slab_weight(const Atom& a, double z_lo, double z_hi);

// Text atom list: "x y z V0 sigma" per line, '#' comments, optional
// "slab <z0>" line. Without a slab line the tightest slab [z0, 0] holding all
// atoms with margin is used (atoms must then satisfy z + 3 sigma <= 0).
Phantom read_atom_list(std::istream& in);
Phantom load_atom_list(const std::filesystem::path& path);
void write_atom_list(const Phantom& p, std::ostream& out);
void save_atom_list(const Phantom& p, const std::filesystem::path& path);

// Element-labelled coordinates "El x y z" mapped through a per-element
// (V0, sigma) table.
struct SpeciesParams {
  double amplitude;
  double width;
};
std::map<std::string, SpeciesParams> default_species_table();
Phantom read_species_file(std::istream& in, const std::map<std::string, SpeciesParams>& table, double z0 = 0);

struct RandomPhantomSpec {
  int count = 20;
  double slab_thickness = 40.0;
  // Atoms are drawn with |x| <= half_width_x, |y| <= half_width_y. If
  // cylinder_radius > 0 the (x, z) position is additionally confined to that
  // radius about the rotation axis.
  double half_width_x = 20.0;
  double half_width_y = 20.0;
  double cylinder_radius = 0.0;
  double amplitude = 50.0;
  double width = 0.8;
  double min_separation = 2.5;
  std::uint64_t seed = 1;
};
Phantom random_phantom(const RandomPhantomSpec& spec);

}  // namespace dtem
