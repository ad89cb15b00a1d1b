#include "dtem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace dtem {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size(), ErrorCode::mismatch, "correlation of arrays with different sizes");
  if (a.empty()) return 0.0;
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 && sbb == 0) return a == b ? 1.0 : 0.0;
  if (saa == 0 || sbb == 0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

ErrorReport image_error(const RealField2& test, const RealField2& reference, double object_fraction) {
  require(test.grid() == reference.grid(), ErrorCode::mismatch, "image_error: grids differ");
  ErrorReport r;
  const std::size_t n = test.size();
  r.samples = n;
  r.error_map.resize(n);
  double peak = 0;
  for (double v : reference.values()) peak = std::max(peak, std::abs(v));
  const double object_level = object_fraction * peak;
  double sum = 0, sum_obj = 0, sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = test[i] - reference[i];
    const double pct = 100.0 * std::abs(d);
    r.error_map[i] = pct;
    sum += pct;
    sq += d * d;
    r.max_percent = std::max(r.max_percent, pct);
    if (peak > 0 && std::abs(reference[i]) >= object_level) {
      sum_obj += pct;
      ++r.object_samples;
    }
  }
  r.mean_percent = n ? sum / n : 0.0;
  r.mean_object_percent = r.object_samples ? sum_obj / r.object_samples : 0.0;
  r.rms = n ? std::sqrt(sq / n) : 0.0;
  r.rms_over_peak = peak > 0 ? r.rms / peak : 0.0;
  r.correlation = correlation(test.values(), reference.values());
  return r;
}

RealField2 thresholded_map(const ErrorReport& r, const Grid2& g, double threshold_percent) {
  require(r.error_map.size() == g.size(), ErrorCode::mismatch, "error map does not match the grid");
  RealField2 out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = r.error_map[i] >= threshold_percent ? r.error_map[i] : 0.0;
  return out;
}

double atom_site_peak(const Volume3& v, const Atom& atom, const Phantom& phantom) {
  const Grid3& g = v.grid();
  const int cx = static_cast<int>(std::lround(atom.position.x / g.dx())) + g.nx() / 2;
  const int cy = static_cast<int>(std::lround(atom.position.y / g.dy())) + g.ny() / 2;
  const int cz = static_cast<int>(std::lround((atom.position.z - phantom.center_z()) / g.dz())) + g.nz() / 2;
  if (cx < 0 || cx >= g.nx() || cy < 0 || cy >= g.ny() || cz < 0 || cz >= g.nz())
    return std::numeric_limits<double>::quiet_NaN();
  double best = 0;
  for (int iz = std::max(cz - 1, 0); iz <= std::min(cz + 1, g.nz() - 1); ++iz)
    for (int iy = std::max(cy - 1, 0); iy <= std::min(cy + 1, g.ny() - 1); ++iy)
      for (int ix = std::max(cx - 1, 0); ix <= std::min(cx + 1, g.nx() - 1); ++ix) {
        const double val = v(ix, iy, iz);
        if (std::abs(val) > std::abs(best)) best = val;
      }
  return best;
}

ErrorReport volume_error(const Volume3& test, const Volume3& reference, const Phantom* phantom) {
  require(test.grid() == reference.grid(), ErrorCode::mismatch, "volume_error: grids differ");
  ErrorReport r;
  const std::size_t n = test.size();
  r.samples = r.object_samples = n;
  r.error_map.resize(n);
  double peak = 0, sq = 0, sum = 0;
  for (double v : reference.values()) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    const double d = test[i] - reference[i];
    r.error_map[i] = std::abs(d);
    sq += d * d;
    sum += std::abs(d);
    r.max_percent = std::max(r.max_percent, std::abs(d));
  }
  r.rms = n ? std::sqrt(sq / n) : 0.0;
  r.rms_over_peak = peak > 0 ? r.rms / peak : 0.0;
  // For volumes the percentages are relative to the reference peak.
  r.mean_percent = r.mean_object_percent = peak > 0 && n ? 100.0 * sum / n / peak : 0.0;
  r.max_percent = peak > 0 ? 100.0 * r.max_percent / peak : 0.0;
  r.correlation = correlation(test.values(), reference.values());
  if (phantom)
    for (const Atom& a : phantom->atoms()) r.site_peaks.push_back(atom_site_peak(test, a, *phantom));
  return r;
}

void write_report_text(std::ostream& out, const std::string& title, const ErrorReport& r) {
  out << title << "\n";
  out << "  mean relative error (all)    " << r.mean_percent << " %\n";
  out << "  mean relative error (object) " << r.mean_object_percent << " %  (" << r.object_samples << " of "
      << r.samples << " samples)\n";
  out << "  max relative error           " << r.max_percent << " %\n";
  out << "  rms                          " << r.rms << "  (" << 100.0 * r.rms_over_peak << " % of peak)\n";
  out << "  correlation                  " << r.correlation << "\n";
  if (!r.site_peaks.empty()) {
    out << "  atom-site peaks             ";
    for (double p : r.site_peaks) out << " " << p;
    out << "\n";
  }
}

KeyValueFile report_key_values(const ErrorReport& r) {
  KeyValueFile kv;
  kv.set("mean_percent", r.mean_percent);
  kv.set("mean_object_percent", r.mean_object_percent);
  kv.set("max_percent", r.max_percent);
  kv.set("rms", r.rms);
  kv.set("rms_over_peak", r.rms_over_peak);
  kv.set("correlation", r.correlation);
  kv.set("samples", static_cast<long long>(r.samples));
  kv.set("object_samples", static_cast<long long>(r.object_samples));
  if (!r.site_peaks.empty()) {
    std::string list;
    int negative = 0;
    for (std::size_t i = 0; i < r.site_peaks.size(); ++i) {
      list += (i ? " " : "") + format_double(r.site_peaks[i]);
      if (r.site_peaks[i] < 0) ++negative;
    }
    kv.set("site_peaks", list);
    kv.set("negative_site_peaks", negative);
  }
  return kv;
}

RealField2 axial_slice(const Volume3& v, int iy) {
  const Grid3& g = v.grid();
  require(iy >= 0 && iy < g.ny(), ErrorCode::invalid_argument, "axial slice row outside the volume");
  RealField2 out(Grid2(g.nx(), g.nz(), g.dx(), g.dz()));
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int ix = 0; ix < g.nx(); ++ix) out(ix, iz) = v(ix, iy, iz);
  return out;
}

namespace {

unsigned char gray(double v, double lo, double hi) {
  if (!(hi > lo)) return 128;
  const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(255.0 * t));
}

void write_gray(const std::filesystem::path& path, int w, int h, const std::vector<unsigned char>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << "P5\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const RealField2& image, double lo, double hi) {
  write_pgm_panels(path, {image}, {{lo, hi}}, 0);
}

void write_pgm_panels(const std::filesystem::path& path, const std::vector<RealField2>& panels,
                      const std::vector<std::pair<double, double>>& ranges, int gap) {
  require(!panels.empty() && panels.size() == ranges.size(), ErrorCode::invalid_argument,
          "need one display range per panel");
  const int h = panels.front().grid().ny();
  int w = 0;
  for (const auto& p : panels) {
    require(p.grid().ny() == h, ErrorCode::mismatch, "panels differ in height");
    w += p.grid().nx();
  }
  w += gap * static_cast<int>(panels.size() - 1);
  std::vector<unsigned char> px(static_cast<std::size_t>(w) * h, 255);
  int x0 = 0;
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const RealField2& p = panels[k];
    for (int iy = 0; iy < h; ++iy)
      for (int ix = 0; ix < p.grid().nx(); ++ix)
        px[static_cast<std::size_t>(iy) * w + x0 + ix] = gray(p(ix, iy), ranges[k].first, ranges[k].second);
    x0 += p.grid().nx() + gap;
  }
  write_gray(path, w, h, px);
}

}  // namespace dtem
