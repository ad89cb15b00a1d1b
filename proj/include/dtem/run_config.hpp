#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dtem/born_forward.hpp"
#include "dtem/ct_baseline.hpp"
#include "dtem/keyvalue.hpp"

namespace dtem {

enum class ReconMethod { ct, dt, tie_dt };

// Everything a simulate/reconstruct run needs. Built from a sectioned
// key = value file:
//   [phantom] file | count slab half_width_x half_width_y cylinder_radius
//             amplitude width min_separation
//   [grid]    nx ny nz dx dy dz
//   [beam]    volts
//   [scan]    angles range_deg defocus (list) model write_phase
//   [recon]   method ct_mode eps alpha oversample filter pad min_coverage
//   [run]     output threads seed
// Angles are measured about +y (right handed); theta = 0 sends the beam
// along +z through the unrotated phantom.
struct RunConfig {
  std::filesystem::path phantom_file;  // empty: random phantom from the fields below
  RandomPhantomSpec random;
  int nx = 128, ny = 128, nz = 128;
  double dx = 0.5, dy = 0.5, dz = 0.5;
  double volts = 200e3;
  int angle_count = 720;
  double range_deg = 360.0;
  std::vector<double> defocus{45.0};
  ForwardModel model = ForwardModel::born;
  bool write_phase = false;
  ReconMethod method = ReconMethod::tie_dt;
  CtMode ct_mode = CtMode::intensity_as_projection;
  double eps = 0.1;
  double alpha = -1.0;  // negative: default regulariser
  int oversample = 2;
  FbpFilter filter = FbpFilter::ram_lak;
  double pad = 0.25;
  double min_coverage = 0.5;
  std::filesystem::path output = "dtem_out";
  int threads = 0;
  std::uint64_t seed = 1;

  // Throws ErrorCode::invalid_argument naming the first bad field.
  void validate() const;
  KeyValueFile to_key_values() const;
};

// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
RunConfig parse_run_config(const KeyValueFile& kv);
RunConfig load_run_config(const std::filesystem::path& path);
// Every key parse_run_config understands.
const std::vector<std::string>& run_config_keys();

std::string_view recon_method_name(ReconMethod m);
std::string_view ct_mode_name(CtMode m);
std::string_view fbp_filter_name(FbpFilter f);

// The scan's angle list: `angle_count` uniform steps over [0, range) joined
// with their theta + pi partners, sorted and deduplicated.
std::vector<double> scan_angles(const RunConfig& c);

}  // namespace dtem
