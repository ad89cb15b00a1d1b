#pragma once

#include <utility>

#include "dtem/projection_set.hpp"

namespace dtem {

struct SimulateOptions {
  MultisliceOptions multislice;
  // Slice count for the `sliced` model; 0 uses round(thickness / dz).
  int slices = 0;
  int threads = 0;
};

// Images of `model` at every angle. `defocus` is measured from the
// rotation-centre plane; `multislice_ctf` sets are refocused onto that plane
// (stored defocus 0) and `phase` sets hold the projected phase in radians.
ProjectionSet simulate_projection_set(const Phantom& p, const Grid3& g, const Beam& b, ForwardModel model,
                                      const std::vector<double>& angles, double defocus,
                                      const SimulateOptions& opts = {});

// One multislice run per angle yielding the defocused set (first) and its
// naively CTF-corrected counterpart (second).
std::pair<ProjectionSet, ProjectionSet> simulate_multislice_with_ctf(const Phantom& p, const Grid3& g,
                                                                     const Beam& b,
                                                                     const std::vector<double>& angles,
                                                                     double defocus,
                                                                     const SimulateOptions& opts = {});

}  // namespace dtem
