#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtem/grid.hpp"
#include "dtem/keyvalue.hpp"
#include "dtem/phantom.hpp"

namespace dtem {

struct ErrorReport {
  // Relative errors in percent of I_in, over all samples and over object
  // samples only.
  double mean_percent = 0;
  double mean_object_percent = 0;
  double max_percent = 0;
  double rms = 0;
  // RMS divided by the largest |reference| value.
  double rms_over_peak = 0;
  double correlation = 0;
  std::size_t samples = 0;
  std::size_t object_samples = 0;
  // Per-sample error: percent for images, absolute for volumes.
  std::vector<double> error_map;
  // Volumes: reconstructed value at each atom site (signed extremum of the
  // 3x3x3 neighbourhood).
  std::vector<double> site_peaks;
};

// Images are contrasts K = 1 - I/I_in, so |K_test - K_ref| is the intensity
// error relative to I_in; the normaliser never depends on the reference.
// Object pixels are those with |K_ref| >= object_fraction * max |K_ref|.
ErrorReport image_error(const RealField2& test, const RealField2& reference, double object_fraction = 0.01);

// Error map with values below `threshold_percent` set to zero.
RealField2 thresholded_map(const ErrorReport& r, const Grid2& g, double threshold_percent);

// Voxel comparison. When `phantom` is given, site_peaks holds one entry per
// atom; sites outside the volume give NaN.
ErrorReport volume_error(const Volume3& test, const Volume3& reference, const Phantom* phantom = nullptr);

// Signed extremum of the 3x3x3 neighbourhood of the voxel nearest to `atom`.
double atom_site_peak(const Volume3& v, const Atom& atom, const Phantom& phantom);

// Pearson correlation; 1 for two identical constant inputs, 0 when only one
// is constant.
double correlation(const std::vector<double>& a, const std::vector<double>& b);

void write_report_text(std::ostream& out, const std::string& title, const ErrorReport& r);
KeyValueFile report_key_values(const ErrorReport& r);

// The (x, z) plane of a volume at row iy, as an image with nx columns and nz
// rows.
RealField2 axial_slice(const Volume3& v, int iy);

// 8-bit binary PGM, first row at the top. Values are mapped linearly from
// [lo, hi] to [0, 255] and clipped.
void write_pgm(const std::filesystem::path& path, const RealField2& image, double lo, double hi);
// Side-by-side panels of equal height separated by a `gap`-pixel white strip.
void write_pgm_panels(const std::filesystem::path& path, const std::vector<RealField2>& panels,
                      const std::vector<std::pair<double, double>>& ranges, int gap = 4);

}  // namespace dtem
