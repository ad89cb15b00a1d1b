#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dtem/born_forward.hpp"

namespace dtem {

// Images K_theta at one defocus over a set of rotation angles.
struct ProjectionSet {
  Grid2 grid;
  Beam beam;
  double defocus = 0;
  ForwardModel model = ForwardModel::born;
  std::vector<double> angles;
  std::vector<RealField2> images;
  std::string provenance;  // free text, kept verbatim on disk

  std::size_t size() const { return angles.size(); }
  ContrastImage image(std::size_t i) const { return ContrastImage{images.at(i), defocus, angles.at(i), model}; }
  // Checks sizes and grids; throws ErrorCode::mismatch.
  void validate() const;
};

// count angles 2 pi k / count, k = 0 .. count-1.
std::vector<double> uniform_angles(int count);

// Throws ErrorCode::invalid_argument unless the angles are strictly
// increasing with one uniform step covering [0, 2 pi).
void require_uniform_angles(const std::vector<double>& angles);

// For every angle the index of its theta + pi partner. Throws
// ErrorCode::invalid_argument listing every angle without a partner.
std::vector<std::size_t> partner_indices(const std::vector<double>& angles);

// Directory layout: metadata.txt (key = value) and proj_NNNN.f64 per image
// (little-endian binary64, row-major, x fastest). Writing then reading
// reproduces every value bit for bit.
void write_projection_set(const ProjectionSet& ps, const std::filesystem::path& dir);
ProjectionSet read_projection_set(const std::filesystem::path& dir);

}  // namespace dtem
