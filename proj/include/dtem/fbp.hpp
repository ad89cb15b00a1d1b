#pragma once

#include <vector>

#include "dtem/grid.hpp"

namespace dtem {

enum class FbpFilter { ram_lak, hann };

struct FbpOptions {
  FbpFilter filter = FbpFilter::ram_lak;
  int threads = 0;
};

// Slice-by-slice (fixed y) filtered back-projection of line integrals taken
// about the y axis. projections[i] holds p(x', y) = integral of V along the
// beam for the object rotated by angles[i]; angles must be uniform over
// [0, 2 pi). Opposite views are averaged: the 2 pi sum carries half the
// weight of a pi-range FBP. The volume's transverse plane must equal the projection grid;
// voxel z is relative to the rotation axis.
Volume3 fbp_reconstruct(const std::vector<RealField2>& projections, const std::vector<double>& angles,
                        const Grid3& volume, const FbpOptions& opts = {});

// Ram-Lak (optionally Hann-apodised) ramp filter applied along x to every
// row, with zero padding against wrap-around.
RealField2 ramp_filter(const RealField2& projection, FbpFilter filter);

}  // namespace dtem
