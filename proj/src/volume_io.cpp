#include "dtem/volume_io.hpp"

#include "dtem/binary_io.hpp"

namespace dtem {

namespace {

constexpr const char* kFormat = "dtem-volume";

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '#') c = ' ';
  return s;
}

}  // namespace

void write_volume(const VolumeFile& v, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  const Grid3& g = v.volume.grid();
  KeyValueFile kv;
  kv.set("format", kFormat);
  kv.set("version", 1);
  kv.set("nx", g.nx());
  kv.set("ny", g.ny());
  kv.set("nz", g.nz());
  kv.set("dx", g.dx());
  kv.set("dy", g.dy());
  kv.set("dz", g.dz());
  kv.set("z0", g.z0());
  kv.set("order", "x fastest, then y, then z; z relative to the rotation centre");
  kv.set("sample_type", "float64-le");
  kv.set("units", one_line(v.units));
  kv.set("method", one_line(v.method));
  kv.set("provenance", one_line(v.provenance));
  const bool has_mask = !v.coverage_mask.empty();
  kv.set("coverage_mask", has_mask ? "coverage.u8" : "none");
  if (has_mask) {
    const std::size_t n = static_cast<std::size_t>(v.mask_dims[0]) * v.mask_dims[1] * v.mask_dims[2];
    require(n == v.coverage_mask.size(), ErrorCode::mismatch, "coverage mask size differs from its dimensions");
    kv.set("mask_nx", v.mask_dims[0]);
    kv.set("mask_ny", v.mask_dims[1]);
    kv.set("mask_nz", v.mask_dims[2]);
  }
  for (const auto& k : v.info.keys()) kv.set("info." + k, one_line(v.info.get(k)));
  kv.save(dir / "volume.txt");
  write_f64(dir / "volume.f64", v.volume.values());
  if (has_mask) write_u8(dir / "coverage.u8", v.coverage_mask);
}

VolumeFile read_volume(const std::filesystem::path& dir) {
  const auto meta = dir / "volume.txt";
  if (!std::filesystem::exists(meta)) fail(ErrorCode::io, "no volume at " + dir.string());
  const KeyValueFile kv = KeyValueFile::load(meta);
  if (kv.get_or("format", "") != kFormat) fail(ErrorCode::io, meta.string() + ": not a volume sidecar");
  const Grid3 g(Grid2(static_cast<int>(kv.get_int("nx")), static_cast<int>(kv.get_int("ny")), kv.get_double("dx"),
                      kv.get_double("dy")),
                static_cast<int>(kv.get_int("nz")), kv.get_double("dz"), kv.get_double("z0"));
  VolumeFile v;
  v.volume = Volume3(g);
  v.volume.values() = read_f64(dir / "volume.f64", g.size());
  v.units = kv.get_or("units", "");
  v.method = kv.get_or("method", "");
  v.provenance = kv.get_or("provenance", "");
  if (kv.get_or("coverage_mask", "none") != "none") {
    v.mask_dims[0] = static_cast<int>(kv.get_int("mask_nx"));
    v.mask_dims[1] = static_cast<int>(kv.get_int("mask_ny"));
    v.mask_dims[2] = static_cast<int>(kv.get_int("mask_nz"));
    const std::size_t n = static_cast<std::size_t>(v.mask_dims[0]) * v.mask_dims[1] * v.mask_dims[2];
    v.coverage_mask = read_u8(dir / kv.get("coverage_mask"), n);
  }
  for (const auto& k : kv.keys())
    if (k.rfind("info.", 0) == 0) v.info.set(k.substr(5), kv.get(k));
  return v;
}

}  // namespace dtem
