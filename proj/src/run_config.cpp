#include "dtem/run_config.hpp"

#include "dtem/projection_set.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dtem {

namespace {

template <typename E>
E parse_enum(const std::string& key, const std::string& value,
             std::initializer_list<std::pair<std::string_view, E>> table) {
  for (const auto& [name, e] : table)
    if (name == value) return e;
  std::ostringstream os;
  os << key << ": unknown value '" << value << "' (expected";
  for (const auto& [name, e] : table) os << " " << name;
  os << ")";
  fail(ErrorCode::invalid_argument, os.str());
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::invalid_argument, key + ": expected true or false, got '" + v + "'");
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys{
      "phantom.file",     "phantom.count",       "phantom.slab",          "phantom.half_width_x",
      "phantom.half_width_y", "phantom.cylinder_radius", "phantom.amplitude", "phantom.width",
      "phantom.min_separation", "grid.nx", "grid.ny", "grid.nz", "grid.dx", "grid.dy", "grid.dz",
      "beam.volts", "scan.angles", "scan.range_deg", "scan.defocus", "scan.model", "scan.write_phase",
      "recon.method", "recon.ct_mode", "recon.eps", "recon.alpha", "recon.oversample", "recon.filter",
      "recon.pad", "recon.min_coverage", "run.output", "run.threads", "run.seed"};
  return keys;
}

std::string_view recon_method_name(ReconMethod m) {
  switch (m) {
    case ReconMethod::ct: return "ct";
    case ReconMethod::dt: return "dt";
    case ReconMethod::tie_dt: return "tie_dt";
  }
  return "?";
}

std::string_view ct_mode_name(CtMode m) {
  return m == CtMode::true_phase ? "true_phase" : "intensity";
}

std::string_view fbp_filter_name(FbpFilter f) { return f == FbpFilter::hann ? "hann" : "ram_lak"; }

RunConfig parse_run_config(const KeyValueFile& kv) {
  const auto& known = run_config_keys();
  for (const auto& k : kv.keys())
    if (std::find(known.begin(), known.end(), k) == known.end())
      fail(ErrorCode::invalid_argument, "unknown configuration key '" + k + "'");
  RunConfig c;
  const auto num = [&](const char* key, double fallback) {
    try {
      return kv.get_double_or(key, fallback);
    } catch (const Error& e) {
      fail(ErrorCode::invalid_argument, e.what());
    }
  };
  const auto integer = [&](const char* key, long long fallback) {
    try {
      return kv.get_int_or(key, fallback);
    } catch (const Error& e) {
      fail(ErrorCode::invalid_argument, e.what());
    }
  };
  c.phantom_file = kv.get_or("phantom.file", "");
  c.random.count = static_cast<int>(integer("phantom.count", 5));
  c.random.slab_thickness = num("phantom.slab", 48.0);
  c.random.half_width_x = num("phantom.half_width_x", 20.0);
  c.random.half_width_y = num("phantom.half_width_y", 20.0);
  c.random.cylinder_radius = num("phantom.cylinder_radius", 24.0);
  c.random.amplitude = num("phantom.amplitude", 50.0);
  c.random.width = num("phantom.width", 0.8);
  c.random.min_separation = num("phantom.min_separation", 2.5);
  c.nx = static_cast<int>(integer("grid.nx", c.nx));
  c.ny = static_cast<int>(integer("grid.ny", c.ny));
  c.nz = static_cast<int>(integer("grid.nz", c.nz));
  c.dx = num("grid.dx", c.dx);
  c.dy = num("grid.dy", c.dy);
  c.dz = num("grid.dz", c.dz);
  c.volts = num("beam.volts", c.volts);
  c.angle_count = static_cast<int>(integer("scan.angles", c.angle_count));
  c.range_deg = num("scan.range_deg", c.range_deg);
  if (kv.contains("scan.defocus")) {
    try {
      c.defocus = kv.get_doubles("scan.defocus");
    } catch (const Error& e) {
      fail(ErrorCode::invalid_argument, e.what());
    }
  }
  if (kv.contains("scan.model")) {
    const auto m = parse_forward_model(kv.get("scan.model"));
    if (!m) fail(ErrorCode::invalid_argument, "scan.model: unknown forward model '" + kv.get("scan.model") + "'");
    c.model = *m;
  }
  c.write_phase = parse_bool("scan.write_phase", kv.get_or("scan.write_phase", "false"));
  c.method = parse_enum<ReconMethod>("recon.method", kv.get_or("recon.method", "tie_dt"),
                                     {{"ct", ReconMethod::ct}, {"dt", ReconMethod::dt}, {"tie_dt", ReconMethod::tie_dt}});
  c.ct_mode = parse_enum<CtMode>("recon.ct_mode", kv.get_or("recon.ct_mode", "intensity"),
                                 {{"intensity", CtMode::intensity_as_projection}, {"true_phase", CtMode::true_phase}});
  c.eps = num("recon.eps", c.eps);
  c.alpha = num("recon.alpha", c.alpha);
  c.oversample = static_cast<int>(integer("recon.oversample", c.oversample));
  c.filter = parse_enum<FbpFilter>("recon.filter", kv.get_or("recon.filter", "ram_lak"),
                                   {{"ram_lak", FbpFilter::ram_lak}, {"hann", FbpFilter::hann}});
  c.pad = num("recon.pad", c.pad);
  c.min_coverage = num("recon.min_coverage", c.min_coverage);
  c.output = kv.get_or("run.output", c.output.string());
  c.threads = static_cast<int>(integer("run.threads", c.threads));
  const long long seed = integer("run.seed", 1);
  require(seed >= 0, ErrorCode::invalid_argument, "run.seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.random.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(KeyValueFile::load(path)); }

void RunConfig::validate() const {
  const auto check = [](bool ok, const std::string& what) { require(ok, ErrorCode::invalid_argument, what); };
  check(nx >= 2 && ny >= 2 && nz >= 2 && nx % 2 == 0 && ny % 2 == 0 && nz % 2 == 0,
        "grid.nx, grid.ny, grid.nz must be even and >= 2");
  check(dx > 0 && dy > 0 && dz > 0, "grid spacings must be positive");
  check(volts > 0, "beam.volts must be positive");
  check(angle_count >= 1, "scan.angles must be >= 1");
  check(range_deg > 0 && range_deg <= 360, "scan.range_deg must be in (0, 360]");
  check(!defocus.empty(), "scan.defocus needs at least one value");
  check(eps >= 0, "recon.eps must be >= 0");
  check(oversample >= 1 && oversample <= 4, "recon.oversample must be 1..4");
  check(pad >= 0, "recon.pad must be >= 0");
  check(min_coverage >= 0 && min_coverage <= 1, "recon.min_coverage must be in [0, 1]");
  check(threads >= 0, "run.threads must be >= 0");
  if (phantom_file.empty()) {
    check(random.count >= 0, "phantom.count must be >= 0");
    check(random.slab_thickness > 0, "phantom.slab must be positive");
  }
  if (method == ReconMethod::dt || method == ReconMethod::tie_dt)
    for (double z : defocus) check(z != 0, "dt and tie_dt need a nonzero defocus");
}

KeyValueFile RunConfig::to_key_values() const {
  KeyValueFile kv;
  if (!phantom_file.empty()) {
    kv.set("phantom.file", phantom_file.string());
  } else {
    kv.set("phantom.count", random.count);
    kv.set("phantom.slab", random.slab_thickness);
    kv.set("phantom.half_width_x", random.half_width_x);
    kv.set("phantom.half_width_y", random.half_width_y);
    kv.set("phantom.cylinder_radius", random.cylinder_radius);
    kv.set("phantom.amplitude", random.amplitude);
    kv.set("phantom.width", random.width);
    kv.set("phantom.min_separation", random.min_separation);
  }
  kv.set("grid.nx", nx);
  kv.set("grid.ny", ny);
  kv.set("grid.nz", nz);
  kv.set("grid.dx", dx);
  kv.set("grid.dy", dy);
  kv.set("grid.dz", dz);
  kv.set("beam.volts", volts);
  kv.set("scan.angles", angle_count);
  kv.set("scan.range_deg", range_deg);
  std::string list;
  for (std::size_t i = 0; i < defocus.size(); ++i) list += (i ? " " : "") + format_double(defocus[i]);
  kv.set("scan.defocus", list);
  kv.set("scan.model", std::string(forward_model_name(model)));
  kv.set("scan.write_phase", write_phase ? "true" : "false");
  kv.set("recon.method", std::string(recon_method_name(method)));
  kv.set("recon.ct_mode", std::string(ct_mode_name(ct_mode)));
  kv.set("recon.eps", eps);
  kv.set("recon.alpha", alpha);
  kv.set("recon.oversample", oversample);
  kv.set("recon.filter", std::string(fbp_filter_name(filter)));
  kv.set("recon.pad", pad);
  kv.set("recon.min_coverage", min_coverage);
  kv.set("run.output", output.string());
  kv.set("run.threads", threads);
  kv.set("run.seed", static_cast<long long>(seed));
  return kv;
}

std::vector<double> scan_angles(const RunConfig& c) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (c.range_deg == 360.0 && c.angle_count % 2 == 0) return uniform_angles(c.angle_count);
  const double range = c.range_deg * std::numbers::pi / 180.0;
  std::vector<double> all;
  for (int k = 0; k < c.angle_count; ++k) {
    const double t = range * k / c.angle_count;
    all.push_back(t);
    all.push_back(std::fmod(t + std::numbers::pi, two_pi));
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double t : all) {
    const bool wraps = !out.empty() && two_pi - t + out.front() < 1e-9;
    if ((out.empty() || t - out.back() > 1e-9) && !wraps) out.push_back(t);
  }
  return out;
}

}  // namespace dtem
