#include "dtem/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dtem/dt_recon.hpp"
#include "dtem/selftest.hpp"
#include "dtem/simulate.hpp"
#include "dtem/tie_recon.hpp"
#include "dtem/volume_io.hpp"

namespace dtem {

namespace fs = std::filesystem;

namespace {

void write_run_stamp(const fs::path& out, const char* stage) {
  KeyValueFile kv;
  kv.set("version", kVersion);
  kv.set("stage", stage);
  kv.save(out / "run.txt");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// fig2 display threshold (percent of I_in).
constexpr double kErrorDisplayThreshold = 3.0;

std::pair<double, double> symmetric_range(const RealField2& f) {
  double m = 0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return {-m, m};
}

std::pair<double, double> full_range(const RealField2& f) {
  double lo = 0, hi = 0;
  for (double v : f.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

}  // namespace

Phantom build_phantom(const RunConfig& c) {
  if (!c.phantom_file.empty()) return load_atom_list(c.phantom_file);
  return random_phantom(c.random);
}

Grid3 run_grid(const RunConfig& c, const Phantom& p) {
  return Grid3(Grid2(c.nx, c.ny, c.dx, c.dy), c.nz, c.dz, p.z0());
}

std::string set_directory_name(ForwardModel m, double defocus) {
  std::string name(forward_model_name(m));
  if (m == ForwardModel::phase || m == ForwardModel::multislice_ctf) return name;
  return name + "_z" + format_short(defocus);
}

std::vector<fs::path> run_simulate(const RunConfig& c, const fs::path& out) {
  c.validate();
  const Phantom p = build_phantom(c);
  const Grid3 g = run_grid(c, p);
  const Beam beam = Beam::from_voltage(c.volts);
  const auto angles = scan_angles(c);
  const double half_x = 0.5 * c.nx * c.dx, half_z = 0.5 * c.nz * c.dz;
  if (p.rotation_radius() > std::min(half_x, half_z)) {
    std::ostringstream os;
    os << "phantom reaches " << p.rotation_radius() << " A from the rotation axis; the grid holds "
       << std::min(half_x, half_z) << " A";
    fail(ErrorCode::invalid_argument, os.str());
  }

  make_dir(out / "sets");
  c.to_key_values().save(out / "config.txt");
  write_run_stamp(out, "simulate");
  save_atom_list(p, out / "phantom.txt");

  SimulateOptions opts;
  opts.threads = c.threads;
  std::vector<fs::path> written;
  auto store = [&](const ProjectionSet& ps, double z) {
    const fs::path dir = out / "sets" / set_directory_name(ps.model, z);
    write_projection_set(ps, dir);
    written.push_back(dir);
  };
  for (std::size_t k = 0; k < c.defocus.size(); ++k) {
    const double z = c.defocus[k];
    if (c.model == ForwardModel::multislice) {
      auto [raw, ctf] = simulate_multislice_with_ctf(p, g, beam, angles, z, opts);
      store(raw, z);
      // The corrected set does not depend on the defocus; keep the first.
      if (k == 0) store(ctf, z);
    } else if (c.model != ForwardModel::phase) {
      store(simulate_projection_set(p, g, beam, c.model, angles, z, opts), z);
    }
  }
  if (c.write_phase || c.model == ForwardModel::phase)
    store(simulate_projection_set(p, g, beam, ForwardModel::phase, angles, 0.0, opts), 0.0);
  return written;
}

ReconstructionOutcome run_reconstruct(const RunConfig& c, const std::vector<fs::path>& inputs, const fs::path& out,
                                      const fs::path& truth) {
  c.validate();
  require(!inputs.empty(), ErrorCode::invalid_argument, "no projection set given");
  std::vector<ProjectionSet> sets;
  for (const auto& in : inputs) sets.push_back(read_projection_set(in));
  if (c.method != ReconMethod::dt)
    require(sets.size() == 1, ErrorCode::invalid_argument,
            std::string(recon_method_name(c.method)) + " takes exactly one projection set");
  for (const auto& ps : sets)
    require(ps.grid == Grid2(c.nx, c.ny, c.dx, c.dy), ErrorCode::mismatch,
            "projection grid differs from the configured grid");

  fs::path truth_path = truth;
  if (truth_path.empty()) {
    const fs::path guess = inputs.front().parent_path().parent_path() / "phantom.txt";
    if (fs::exists(guess)) truth_path = guess;
  }
  Phantom phantom;
  const bool has_truth = !truth_path.empty();
  if (has_truth) phantom = load_atom_list(truth_path);
  const Grid3 g(sets.front().grid, c.nz, c.dz, has_truth ? phantom.z0() : -c.nz * c.dz);

  ReconstructionOutcome result;
  VolumeFile& vf = result.volume;
  vf.method = std::string(recon_method_name(c.method));
  std::string prov;
  for (const auto& ps : sets) prov += (prov.empty() ? "" : "; ") + ps.provenance;
  vf.provenance = prov;
  FbpOptions fbp;
  fbp.filter = c.filter;
  fbp.threads = c.threads;
  switch (c.method) {
    case ReconMethod::dt: {
      DtOptions o;
      o.eps = c.eps;
      o.oversample = c.oversample;
      o.min_coverage = c.min_coverage;
      o.threads = c.threads;
      std::vector<const ProjectionSet*> ptrs;
      for (const auto& ps : sets) ptrs.push_back(&ps);
      DtResult r = dt_reconstruct(ptrs, g, o);
      vf.volume = std::move(r.volume);
      vf.coverage_mask = std::move(r.coverage_mask);
      for (int a = 0; a < 3; ++a) vf.mask_dims[a] = r.mask_dims[a];
      vf.info.set("coverage", r.coverage);
      vf.info.set("imaginary_residual", r.imaginary_residual);
      vf.info.set("eps", c.eps);
      break;
    }
    case ReconMethod::tie_dt: {
      TieOptions o;
      o.alpha = c.alpha;
      o.pad_fraction = c.pad;
      o.fbp = fbp;
      vf.volume = tie_dt_pipeline(sets.front(), g, o);
      vf.info.set("alpha", c.alpha < 0 ? default_tie_alpha(g.plane()) : c.alpha);
      break;
    }
    case ReconMethod::ct:
      vf.volume = ct_pipeline(sets.front(), g, c.ct_mode, fbp);
      vf.method += std::string("_") + std::string(ct_mode_name(c.ct_mode));
      break;
  }

  make_dir(out);
  write_volume(vf, out);
  c.to_key_values().save(out / "config.txt");
  write_run_stamp(out, "reconstruct");
  if (has_truth) {
    result.has_report = true;
    result.report = volume_error(vf.volume, potential_on_grid(phantom, g), &phantom);
    std::ofstream text(out / "report.txt");
    write_report_text(text, "volume error of " + vf.method + " against the phantom", result.report);
    if (!text) fail(ErrorCode::io, "cannot write " + (out / "report.txt").string());
    KeyValueFile kv = report_key_values(result.report);
    kv.set("method", vf.method);
    kv.save(out / "report.kv");
  }
  return result;
}

std::vector<fs::path> run_figures(const std::vector<fs::path>& run_dirs, const fs::path& out) {
  require(!run_dirs.empty(), ErrorCode::invalid_argument, "no run directories given");
  std::vector<fs::path> written;
  std::vector<VolumeFile> volumes;
  make_dir(out);
  for (const auto& dir : run_dirs) {
    if (fs::exists(dir / "volume.txt")) {
      volumes.push_back(read_volume(dir));
      continue;
    }
    if (!fs::exists(dir / "sets") || !fs::exists(dir / "config.txt"))
      fail(ErrorCode::io, dir.string() + " holds neither a volume nor a simulation run");
    const std::string tag = dir.filename().string();

    // fig1: theta = 0 next to the x-mirrored theta = pi view.
    for (const auto& entry : fs::directory_iterator(dir / "sets")) {
      const ProjectionSet ps = read_projection_set(entry.path());
      if (ps.model == ForwardModel::phase) continue;
      const auto partner = partner_indices(ps.angles);
      const RealField2& a = ps.images.front();
      const RealField2 b = mirror_x(ps.images[partner.front()]);
      double m = std::max(symmetric_range(a).second, symmetric_range(b).second);
      const fs::path f = out / ("fig1_" + tag + "_" + entry.path().filename().string() + ".pgm");
      write_pgm_panels(f, {a, b}, {{-m, m}, {-m, m}});
      written.push_back(f);
    }

    // fig2: projection approximation and per-atom composite against the
    // full multislice image at theta = 0.
    const RunConfig c = load_run_config(dir / "config.txt");
    const Phantom p = load_atom_list(dir / "phantom.txt");
    const Grid3 g = run_grid(c, p);
    const Beam beam = Beam::from_voltage(c.volts);
    const double z = c.defocus.front();
    const RealField2 ms = multislice_contrast(p, g, beam, 0.0, z).image;
    const ErrorReport proj = image_error(projection_contrast(p, g, beam, 0.0, z).image, ms);
    const ErrorReport comp = image_error(per_atom_composite(p, g, beam, 0.0, z).image, ms);
    const RealField2 mp = thresholded_map(proj, g.plane(), kErrorDisplayThreshold);
    const RealField2 mc = thresholded_map(comp, g.plane(), kErrorDisplayThreshold);
    const double top = std::max(full_range(mp).second, kErrorDisplayThreshold);
    const fs::path f2 = out / ("fig2_" + tag + ".pgm");
    write_pgm_panels(f2, {ms, mp, mc}, {symmetric_range(ms), {0, top}, {0, top}});
    written.push_back(f2);
    const fs::path r2 = out / ("fig2_" + tag + ".txt");
    std::ofstream text(r2);
    write_report_text(text, "projection approximation vs multislice", proj);
    write_report_text(text, "per-atom composite vs multislice", comp);
    text << "mean error ratio (all pixels)    " << proj.mean_percent / comp.mean_percent << "\n";
    text << "mean error ratio (object pixels) " << proj.mean_object_percent / comp.mean_object_percent << "\n";
    if (!text) fail(ErrorCode::io, "cannot write " + r2.string());
    written.push_back(r2);
  }

  // fig3: one axial slice per volume, each on its own symmetric scale so
  // that negative (dark) atoms stay visible.
  if (!volumes.empty()) {
    const Grid3& g = volumes.front().volume.grid();
    int row = g.ny() / 2;
    double best = -1;
    for (int iy = 0; iy < g.ny(); ++iy) {
      double e = 0;
      for (int iz = 0; iz < g.nz(); ++iz)
        for (int ix = 0; ix < g.nx(); ++ix) e += std::pow(volumes.front().volume(ix, iy, iz), 2);
      if (e > best) {
        best = e;
        row = iy;
      }
    }
    std::vector<RealField2> panels;
    std::vector<std::pair<double, double>> ranges;
    for (const auto& v : volumes) {
      require(v.volume.grid().ny() == g.ny() && v.volume.grid().nz() == g.nz(), ErrorCode::mismatch,
              "volumes for the fig3 row differ in size");
      panels.push_back(axial_slice(v.volume, row));
      ranges.push_back(symmetric_range(panels.back()));
    }
    const fs::path f3 = out / "fig3.pgm";
    write_pgm_panels(f3, panels, ranges);
    written.push_back(f3);
    const fs::path legend = out / "fig3.txt";
    std::ofstream text(legend);
    text << "axial slice at y = " << g.plane().y(row) << " A, panels left to right:";
    for (const auto& v : volumes) text << " " << v.method;
    text << "\n";
    if (!text) fail(ErrorCode::io, "cannot write " + legend.string());
    written.push_back(legend);
  }
  return written;
}

}  // namespace dtem
