#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dtem/metrics.hpp"
#include "dtem/run_config.hpp"
#include "dtem/volume_io.hpp"

namespace dtem {

// Phantom from phantom.file, or the seeded random phantom.
Phantom build_phantom(const RunConfig& c);

// Reconstruction grid: the configured plane and axial sampling, slab taken
// from the phantom.
Grid3 run_grid(const RunConfig& c, const Phantom& p);

// Name of the directory holding one projection set inside <run>/sets.
std::string set_directory_name(ForwardModel m, double defocus);

// Writes <out>/config.txt, <out>/phantom.txt and one projection set per
// defocus under <out>/sets. Multislice runs also store the naively
// CTF-corrected set from the same waves; write_phase adds the straight-ray
// phase set. Returns the written set directories.
std::vector<std::filesystem::path> run_simulate(const RunConfig& c, const std::filesystem::path& out);

struct ReconstructionOutcome {
  VolumeFile volume;
  bool has_report = false;
  ErrorReport report;
};

// Reconstructs the sets in `inputs` with c.method and writes the volume,
// config.txt and, when a ground-truth phantom is available (`truth`, or
// phantom.txt two levels above the first input), report.txt/report.kv.
ReconstructionOutcome run_reconstruct(const RunConfig& c, const std::vector<std::filesystem::path>& inputs,
                                      const std::filesystem::path& out, const std::filesystem::path& truth = {});

// fig1 pairs and fig2 maps from simulation runs, a fig3 panel row from
// reconstruction runs. Returns the written files.
std::vector<std::filesystem::path> run_figures(const std::vector<std::filesystem::path>& run_dirs,
                                               const std::filesystem::path& out);

}  // namespace dtem
