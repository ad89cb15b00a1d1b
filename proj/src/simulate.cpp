#include "dtem/simulate.hpp"

#include <cmath>
#include <sstream>

#include "dtem/ct_baseline.hpp"
#include "dtem/parallel.hpp"

namespace dtem {

namespace {

ProjectionSet empty_set(const Grid3& g, const Beam& b, ForwardModel model, const std::vector<double>& angles,
                        double defocus, const Phantom& p) {
  ProjectionSet ps;
  ps.grid = g.plane();
  ps.beam = b;
  ps.defocus = defocus;
  ps.model = model;
  ps.angles = angles;
  ps.images.resize(angles.size());
  std::ostringstream os;
  os << "simulated " << forward_model_name(model) << ", " << p.atoms().size() << " atoms, slab " << p.thickness()
     << " A, defocus " << defocus << " A";
  ps.provenance = os.str();
  return ps;
}

}  // namespace

ProjectionSet simulate_projection_set(const Phantom& p, const Grid3& g, const Beam& b, ForwardModel model,
                                      const std::vector<double>& angles, double defocus,
                                      const SimulateOptions& opts) {
  if (model == ForwardModel::multislice_ctf) return simulate_multislice_with_ctf(p, g, b, angles, defocus, opts).second;
  const int slices = opts.slices > 0 ? opts.slices
                                     : std::max(1, static_cast<int>(std::lround(p.thickness() / g.dz())));
  ProjectionSet ps = empty_set(g, b, model, angles, model == ForwardModel::phase ? 0.0 : defocus, p);
  parallel_for(angles.size(), opts.threads, [&](std::size_t i) {
    const double t = angles[i];
    switch (model) {
      case ForwardModel::projection: ps.images[i] = projection_contrast(p, g, b, t, defocus).image; break;
      case ForwardModel::born: ps.images[i] = born_contrast(p, g, b, t, defocus).image; break;
      case ForwardModel::sliced: ps.images[i] = sliced_contrast(p, g, b, t, defocus, slices).image; break;
      case ForwardModel::multislice:
        ps.images[i] = multislice_contrast(p, g, b, t, defocus, opts.multislice).image;
        break;
      case ForwardModel::per_atom:
        ps.images[i] = per_atom_composite(p, g, b, t, defocus, opts.multislice).image;
        break;
      case ForwardModel::phase: {
        RealField2 phi = line_projection(p, g.plane(), t);
        for (auto& v : phi.values()) v *= b.interaction();
        ps.images[i] = std::move(phi);
        break;
      }
      case ForwardModel::multislice_ctf: break;
    }
  });
  return ps;
}

std::pair<ProjectionSet, ProjectionSet> simulate_multislice_with_ctf(const Phantom& p, const Grid3& g,
                                                                     const Beam& b,
                                                                     const std::vector<double>& angles,
                                                                     double defocus,
                                                                     const SimulateOptions& opts) {
  ProjectionSet raw = empty_set(g, b, ForwardModel::multislice, angles, defocus, p);
  ProjectionSet ctf = empty_set(g, b, ForwardModel::multislice_ctf, angles, 0.0, p);
  ctf.provenance += ", refocused to the rotation-centre plane";
  parallel_for(angles.size(), opts.threads, [&](std::size_t i) {
    const Wavefield w = multislice(p, g, b, angles[i], defocus, opts.multislice);
    raw.images[i] = intensity_contrast(w);
    // The wave plane is `defocus` past the centre, wherever the slab sits.
    ctf.images[i] = ctf_correct_naive(w, w.z - defocus);
  });
  return {std::move(raw), std::move(ctf)};
}

}  // namespace dtem
