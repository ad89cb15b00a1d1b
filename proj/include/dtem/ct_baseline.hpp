#pragma once

#include "dtem/fbp.hpp"
#include "dtem/projection_set.hpp"
#include "dtem/propagation.hpp"

namespace dtem {

// Naive global CTF correction: propagate the complex wave to the absolute
// plane `center_plane` (normally the rotation-centre plane) and return
// 1 - I/I_in there.
RealField2 ctf_correct_naive(const Wavefield& w, double center_plane);

enum class CtMode {
  intensity_as_projection,  // FBP on (lambda E / pi) K
  true_phase,               // FBP on (lambda E / pi) phi; needs a `phase` set
};

// Conventional CT: every image is taken as a straight-ray line integral.
Volume3 ct_pipeline(const ProjectionSet& ps, const Grid3& volume, CtMode mode, const FbpOptions& opts = {});

}  // namespace dtem
