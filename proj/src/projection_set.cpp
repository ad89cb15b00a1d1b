#include "dtem/projection_set.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "dtem/binary_io.hpp"
#include "dtem/keyvalue.hpp"

namespace dtem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleTolerance = 1e-9;
constexpr const char* kFormat = "dtem-projection-set";

std::string image_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "proj_%04zu.f64", i);
  return buf;
}

double wrap(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double angular_distance(double a, double b) {
  const double d = wrap(a - b);
  return std::min(d, kTwoPi - d);
}

}  // namespace

void ProjectionSet::validate() const {
  require(images.size() == angles.size(), ErrorCode::mismatch, "projection set: image and angle counts differ");
  for (const auto& img : images)
    require(img.grid() == grid, ErrorCode::mismatch, "projection set: image grid differs from set grid");
}

std::vector<double> uniform_angles(int count) {
  require(count >= 1, ErrorCode::invalid_argument, "angle count must be >= 1");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = kTwoPi * k / count;
  return out;
}

void require_uniform_angles(const std::vector<double>& angles) {
  require(!angles.empty(), ErrorCode::invalid_argument, "angle list is empty");
  const double step = kTwoPi / angles.size();
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double expect = angles[0] + step * i;
    if (!(angles[i] >= 0 && angles[i] < kTwoPi) || std::abs(angles[i] - expect) > kAngleTolerance) {
      std::ostringstream os;
      os << "angles must be uniform over [0, 2 pi) with step " << step << " rad; angle " << i << " is "
         << angles[i];
      fail(ErrorCode::invalid_argument, os.str());
    }
  }
  require(angles[0] < step + kAngleTolerance, ErrorCode::invalid_argument, "angle list does not start in [0, step)");
}

std::vector<std::size_t> partner_indices(const std::vector<double>& angles) {
  std::vector<std::size_t> partner(angles.size());
  std::vector<std::size_t> missing;
  // Angles are usually sorted, so a binary search on the wrapped target
  // would do; the quadratic scan keeps this robust to any order.
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double target = wrap(angles[i] + std::numbers::pi);
    bool found = false;
    for (std::size_t j = 0; j < angles.size() && !found; ++j)
      if (angular_distance(angles[j], target) < kAngleTolerance) {
        partner[i] = j;
        found = true;
      }
    if (!found) missing.push_back(i);
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << missing.size() << " angle(s) lack a theta + pi partner:";
    for (std::size_t k = 0; k < missing.size() && k < 20; ++k) os << " " << angles[missing[k]];
    if (missing.size() > 20) os << " ...";
    os << " (rad)";
    fail(ErrorCode::invalid_argument, os.str());
  }
  return partner;
}

void write_projection_set(const ProjectionSet& ps, const std::filesystem::path& dir) {
  ps.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  KeyValueFile kv;
  kv.set("format", kFormat);
  kv.set("version", 1);
  kv.set("model", std::string(forward_model_name(ps.model)));
  kv.set("nx", ps.grid.nx());
  kv.set("ny", ps.grid.ny());
  kv.set("dx", ps.grid.dx());
  kv.set("dy", ps.grid.dy());
  kv.set("volts", ps.beam.volts());
  kv.set("lambda", ps.beam.lambda());
  kv.set("intensity", ps.beam.intensity());
  kv.set("defocus", ps.defocus);
  kv.set("count", static_cast<long long>(ps.size()));
  kv.set("sample_type", "float64-le");
  std::string list;
  for (std::size_t i = 0; i < ps.size(); ++i) list += (i ? " " : "") + format_double(ps.angles[i]);
  kv.set("angles", list);
  std::string prov = ps.provenance;
  for (char& c : prov)
    if (c == '\n' || c == '#') c = ' ';
  kv.set("provenance", prov);
  kv.save(dir / "metadata.txt");
  for (std::size_t i = 0; i < ps.size(); ++i) write_f64(dir / image_name(i), ps.images[i].values());
}

ProjectionSet read_projection_set(const std::filesystem::path& dir) {
  const auto meta = dir / "metadata.txt";
  if (!std::filesystem::exists(meta)) fail(ErrorCode::io, "no projection set at " + dir.string());
  const KeyValueFile kv = KeyValueFile::load(meta);
  if (kv.get("format") != kFormat) fail(ErrorCode::io, meta.string() + ": not a projection set");
  ProjectionSet ps;
  const auto model = parse_forward_model(kv.get("model"));
  if (!model) fail(ErrorCode::io, meta.string() + ": unknown model " + kv.get("model"));
  ps.model = *model;
  ps.grid = Grid2(static_cast<int>(kv.get_int("nx")), static_cast<int>(kv.get_int("ny")), kv.get_double("dx"),
                  kv.get_double("dy"));
  ps.beam = Beam(kv.get_double("volts"), kv.get_double("lambda"), kv.get_double("intensity"));
  ps.defocus = kv.get_double("defocus");
  ps.angles = kv.get_doubles("angles");
  ps.provenance = kv.get_or("provenance", "");
  const auto count = static_cast<std::size_t>(kv.get_int("count"));
  if (ps.angles.size() != count) fail(ErrorCode::io, meta.string() + ": angle list length differs from count");
  ps.images.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RealField2 img(ps.grid);
    img.values() = read_f64(dir / image_name(i), ps.grid.size());
    ps.images.push_back(std::move(img));
  }
  return ps;
}

}  // namespace dtem
