#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dtem/grid.hpp"
#include "dtem/keyvalue.hpp"

namespace dtem {

struct VolumeFile {
  Volume3 volume;
  std::string units = "volts";
  std::string method;
  std::string provenance;
  // Optional reciprocal coverage mask (1 = covered), x fastest.
  std::vector<std::uint8_t> coverage_mask;
  int mask_dims[3] = {0, 0, 0};
  // Extra diagnostics stored in the sidecar under "info.".
  KeyValueFile info;
};

// dir/volume.f64 (little-endian binary64, x fastest, then y, then z),
// dir/volume.txt (grid, units, method, provenance) and, when present,
// dir/coverage.u8. Bit-exact round trip.
void write_volume(const VolumeFile& v, const std::filesystem::path& dir);
VolumeFile read_volume(const std::filesystem::path& dir);

}  // namespace dtem
