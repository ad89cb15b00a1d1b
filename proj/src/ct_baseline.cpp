#include "dtem/ct_baseline.hpp"

#include "dtem/parallel.hpp"
#include "dtem/tie_recon.hpp"

namespace dtem {

RealField2 ctf_correct_naive(const Wavefield& w, double center_plane) {
  return intensity_contrast(refocus(w, center_plane));
}

Volume3 ct_pipeline(const ProjectionSet& ps, const Grid3& volume, CtMode mode, const FbpOptions& opts) {
  ps.validate();
  if (mode == CtMode::true_phase)
    require(ps.model == ForwardModel::phase, ErrorCode::mismatch,
            "true-phase CT needs a projection set of model 'phase'");
  else
    require(ps.model != ForwardModel::phase, ErrorCode::mismatch,
            "intensity-as-projection CT needs contrast images, not phase maps");
  std::vector<RealField2> lines(ps.size());
  parallel_for(ps.size(), opts.threads,
               [&](std::size_t i) { lines[i] = phase_to_line_integral(ps.images[i], ps.beam); });
  return fbp_reconstruct(lines, ps.angles, volume, opts);
}

}  // namespace dtem
