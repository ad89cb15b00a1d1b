#include "dtem/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace dtem {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFitTolerance = 1e-9;
constexpr double kNegligible = 1e-13;

std::string describe(const Atom& a, std::size_t index) {
  std::ostringstream os;
  os << "atom " << index << " at (" << a.position.x << ", " << a.position.y << ", " << a.position.z << ")";
  return os.str();
}

// erf(b) - erf(a) without cancellation in the tails.
double erf_difference(double a, double b) {
  if (a > 0 && b > 0) return std::erfc(a) - std::erfc(b);
  if (a < 0 && b < 0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

std::vector<double> gaussian_profile(int n, double step, int center_index, double mu, double width) {
  std::vector<double> g(n);
  const double inv = 1.0 / (2.0 * width * width);
  for (int i = 0; i < n; ++i) {
    const double d = (i - center_index) * step - mu;
    g[i] = std::exp(-d * d * inv);
  }
  return g;
}

}  // namespace

Phantom::Phantom(std::vector<Atom> atoms, double z0) : atoms_(std::move(atoms)), z0_(z0) {
  require(z0 < 0, ErrorCode::invalid_argument, "phantom slab origin z0 must be negative");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!(a.amplitude > 0) || !(a.width > 0))
      fail(ErrorCode::invalid_argument, describe(a, i) + ": amplitude and width must be positive");
    const double margin = kMarginSigmas * a.width;
    if (a.position.z > -margin + kFitTolerance || a.position.z < z0 + margin - kFitTolerance) {
      std::ostringstream os;
      os << describe(a, i) << " violates the " << kMarginSigmas << "-sigma margin of slab [" << z0 << ", 0]";
      fail(ErrorCode::invalid_argument, os.str());
    }
  }
}

double Phantom::rotation_radius() const {
  double r = 0;
  for (const Atom& a : atoms_) {
    const double u = a.position.z - center_z();
    r = std::max(r, std::hypot(a.position.x, u) + kMarginSigmas * a.width);
  }
  return r;
}

double Phantom::total_integral() const {
  double sum = 0;
  for (const Atom& a : atoms_) sum += a.amplitude * std::pow(2.0 * kPi * a.width * a.width, 1.5);
  return sum;
}

Volume3 potential_on_grid(const Phantom& p, const Grid3& g) {
  Volume3 v(g);
  const double zc = p.center_z();
  for (std::size_t n = 0; n < p.atoms().size(); ++n) {
    const Atom& a = p.atoms()[n];
    const double xr = a.position.x, yr = a.position.y, ur = a.position.z - zc;
    const bool inside = xr >= g.plane().x(0) && xr <= g.plane().x(g.nx() - 1) && yr >= g.plane().y(0) &&
                        yr <= g.plane().y(g.ny() - 1) && ur >= g.z_rel(0) && ur <= g.z_rel(g.nz() - 1);
    if (!inside) fail(ErrorCode::invalid_argument, describe(a, n) + " lies outside the sampling grid");
    const auto gx = gaussian_profile(g.nx(), g.dx(), g.nx() / 2, xr, a.width);
    const auto gy = gaussian_profile(g.ny(), g.dy(), g.ny() / 2, yr, a.width);
    const auto gz = gaussian_profile(g.nz(), g.dz(), g.nz() / 2, ur, a.width);
    for (int iz = 0; iz < g.nz(); ++iz) {
      const double wz = a.amplitude * gz[iz];
      if (wz == 0.0) continue;
      for (int iy = 0; iy < g.ny(); ++iy) {
        const double wyz = wz * gy[iy];
        if (wyz == 0.0) continue;
        double* row = &v(0, iy, iz);
        for (int ix = 0; ix < g.nx(); ++ix) row[ix] += wyz * gx[ix];
      }
    }
  }
  return v;
}

cplx analytic_ft3(const Phantom& p, const Vec3& q) {
  const double q2 = q.x * q.x + q.y * q.y + q.z * q.z;
  cplx sum = 0;
  for (const Atom& a : p.atoms()) {
    const double s2 = a.width * a.width;
    const double mag = a.amplitude * std::pow(2.0 * kPi * s2, 1.5) * std::exp(-2.0 * kPi * kPi * s2 * q2);
    const double arg =
        -2.0 * kPi * (q.x * a.position.x + q.y * a.position.y + q.z * (a.position.z - p.center_z()));
    sum += mag * cplx(std::cos(arg), std::sin(arg));
  }
  return sum;
}

Phantom rotate_y(const Phantom& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double zc = p.center_z();
  std::vector<Atom> rotated = p.atoms();
  double half = 0.5 * p.thickness();
  for (Atom& a : rotated) {
    const double x = a.position.x, u = a.position.z - zc;
    a.position.x = x * c + u * s;
    a.position.z = -x * s + u * c;  // centre-relative for now
    half = std::max(half, std::abs(a.position.z) + Phantom::kMarginSigmas * a.width);
  }
  for (Atom& a : rotated) a.position.z -= half;
  return Phantom(std::move(rotated), -2.0 * half);
}

RealField2 slab_projection(const Phantom& p, const Grid2& g, double z_lo, double z_hi) {
  RealField2 out(g);
  for (const Atom& a : p.atoms()) {
    const double peak = atom_slab_weight(a, z_lo, z_hi);
    // Slices holding less than 1e-13 of the atom are skipped.
    if (std::abs(peak) < kNegligible * a.amplitude * a.width) continue;
    const auto gx = gaussian_profile(g.nx(), g.dx(), g.nx() / 2, a.position.x, a.width);
    const auto gy = gaussian_profile(g.ny(), g.dy(), g.ny() / 2, a.position.y, a.width);
    // Transverse window of +-8 sigma (exp(-32) ~ 1e-14), symmetric under x -> -x.
    const double reach = 8.0 * a.width;
    int x_lo = 0, x_hi = g.nx() - 1, y_lo = 0, y_hi = g.ny() - 1;
    while (x_lo < g.nx() && std::abs(g.x(x_lo) - a.position.x) > reach) ++x_lo;
    while (x_hi >= 0 && std::abs(g.x(x_hi) - a.position.x) > reach) --x_hi;
    while (y_lo < g.ny() && std::abs(g.y(y_lo) - a.position.y) > reach) ++y_lo;
    while (y_hi >= 0 && std::abs(g.y(y_hi) - a.position.y) > reach) --y_hi;
    for (int iy = y_lo; iy <= y_hi; ++iy) {
      const double wy = peak * gy[iy];
      double* row = &out(0, iy);
      for (int ix = x_lo; ix <= x_hi; ++ix) row[ix] += wy * gx[ix];
    }
  }
  return out;
}

double atom_slab_weight(const Atom& a, double z_lo, double z_hi) {
  const double scale = 1.0 / (std::numbers::sqrt2 * a.width);
  const double lo = std::isinf(z_lo) ? (z_lo < 0 ? -1.0 : 1.0) * std::numeric_limits<double>::infinity()
                                     : (z_lo - a.position.z) * scale;
  const double hi = std::isinf(z_hi) ? (z_hi < 0 ? -1.0 : 1.0) * std::numeric_limits<double>::infinity()
                                     : (z_hi - a.position.z) * scale;
  return a.amplitude * a.width * std::sqrt(2.0 * kPi) * 0.5 * erf_difference(lo, hi);
}

RealField2 line_projection(const Phantom& p, const Grid2& g, double theta) {
  const double inf = std::numeric_limits<double>::infinity();
  return slab_projection(theta == 0.0 ? p : rotate_y(p, theta), g, -inf, inf);
}

Phantom read_atom_list(std::istream& in) {
  std::vector<Atom> atoms;
  std::optional<double> slab;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "slab") {
      double z0;
      if (!(ls >> z0)) fail(ErrorCode::io, "line " + std::to_string(lineno) + ": malformed slab directive");
      slab = z0;
      continue;
    }
    Atom a;
    try {
      a.position.x = std::stod(first);
    } catch (const std::exception&) {
      fail(ErrorCode::io, "line " + std::to_string(lineno) + ": expected 'x y z V0 sigma'");
    }
    if (!(ls >> a.position.y >> a.position.z >> a.amplitude >> a.width))
      fail(ErrorCode::io, "line " + std::to_string(lineno) + ": expected 'x y z V0 sigma'");
    atoms.push_back(a);
  }
  if (!slab) {
    double z0 = 0;
    for (const Atom& a : atoms) z0 = std::min(z0, a.position.z - Phantom::kMarginSigmas * a.width);
    slab = z0 < 0 ? z0 : -1.0;
  }
  return Phantom(std::move(atoms), *slab);
}

Phantom load_atom_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open atom list " + path.string());
  return read_atom_list(in);
}

void write_atom_list(const Phantom& p, std::ostream& out) {
  out << "# x y z V0 sigma  (angstrom, volts)\n";
  out << std::setprecision(17) << "slab " << p.z0() << "\n";
  for (const Atom& a : p.atoms())
    out << a.position.x << " " << a.position.y << " " << a.position.z << " " << a.amplitude << " " << a.width
        << "\n";
}

void save_atom_list(const Phantom& p, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write atom list " + path.string());
  write_atom_list(p, out);
}

std::map<std::string, SpeciesParams> default_species_table() {
  // Surrogate values: amplitudes roughly track atomic number, widths the
  // core size. Not fitted to scattering factors.
  return {{"H", {10.0, 0.6}}, {"C", {50.0, 0.8}}, {"N", {58.0, 0.8}},
          {"O", {66.0, 0.8}}, {"S", {110.0, 0.9}}, {"P", {100.0, 0.9}}};
}

Phantom read_species_file(std::istream& in, const std::map<std::string, SpeciesParams>& table, double z0) {
  std::vector<Atom> atoms;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string element;
    if (!(ls >> element)) continue;
    Atom a;
    if (!(ls >> a.position.x >> a.position.y >> a.position.z))
      fail(ErrorCode::io, "line " + std::to_string(lineno) + ": expected 'El x y z'");
    auto it = table.find(element);
    if (it == table.end()) fail(ErrorCode::io, "line " + std::to_string(lineno) + ": unknown element " + element);
    a.amplitude = it->second.amplitude;
    a.width = it->second.width;
    atoms.push_back(a);
  }
  if (z0 == 0) {
    for (const Atom& a : atoms) z0 = std::min(z0, a.position.z - Phantom::kMarginSigmas * a.width);
    if (z0 == 0) z0 = -1.0;
  }
  return Phantom(std::move(atoms), z0);
}

Phantom random_phantom(const RandomPhantomSpec& spec) {
  require(spec.count >= 0, ErrorCode::invalid_argument, "atom count must be >= 0");
  require(spec.slab_thickness > 2 * Phantom::kMarginSigmas * spec.width, ErrorCode::invalid_argument,
          "slab too thin for the atom width");
  std::mt19937_64 rng(spec.seed);
  // Explicit 53-bit mapping keeps the sequence identical across standard libraries.
  auto uniform = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  const double zc = -0.5 * spec.slab_thickness;
  const double umax = 0.5 * spec.slab_thickness - Phantom::kMarginSigmas * spec.width;
  std::vector<Atom> atoms;
  int attempts = 0;
  while (static_cast<int>(atoms.size()) < spec.count) {
    if (++attempts > 100000) fail(ErrorCode::invalid_argument, "cannot place atoms with the requested separation");
    Atom a;
    a.amplitude = spec.amplitude;
    a.width = spec.width;
    a.position.x = uniform(-spec.half_width_x, spec.half_width_x);
    a.position.y = uniform(-spec.half_width_y, spec.half_width_y);
    const double u = uniform(-umax, umax);
    a.position.z = zc + u;
    if (spec.cylinder_radius > 0 &&
        std::hypot(a.position.x, u) + Phantom::kMarginSigmas * spec.width > spec.cylinder_radius)
      continue;
    bool crowded = false;
    for (const Atom& b : atoms) {
      const double dx = a.position.x - b.position.x, dy = a.position.y - b.position.y,
                   dz = a.position.z - b.position.z;
      if (dx * dx + dy * dy + dz * dz < spec.min_separation * spec.min_separation) crowded = true;
    }
    if (!crowded) atoms.push_back(a);
  }
  return Phantom(std::move(atoms), -spec.slab_thickness);
}

}  // namespace dtem
