#include "dtem/born_forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dtem/log.hpp"

namespace dtem {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<std::pair<ForwardModel, std::string_view>, 7> kModelNames{{
    {ForwardModel::projection, "projection"},
    {ForwardModel::born, "born"},
    {ForwardModel::sliced, "sliced"},
    {ForwardModel::multislice, "multislice"},
    {ForwardModel::per_atom, "per_atom"},
    {ForwardModel::multislice_ctf, "multislice_ctf"},
    {ForwardModel::phase, "phase"},
}};

// Transverse spectrum of one atom's unit-peak Gaussian, 2 pi s^2 exp(-2 pi^2 s^2 q^2)
// exp(-i 2 pi q.r), separated into x and y factors.
struct TransverseFactor {
  std::vector<cplx> fx, fy;
  double scale;

  TransverseFactor(const Grid2& g, const Atom& a) : fx(g.nx()), fy(g.ny()) {
    const double s2 = a.width * a.width;
    scale = 2.0 * kPi * s2;
    for (int k = 0; k < g.nx(); ++k) {
      const double q = g.qx(k);
      fx[k] = std::polar(std::exp(-2.0 * kPi * kPi * s2 * q * q), -2.0 * kPi * q * a.position.x);
    }
    for (int k = 0; k < g.ny(); ++k) {
      const double q = g.qy(k);
      fy[k] = std::polar(std::exp(-2.0 * kPi * kPi * s2 * q * q), -2.0 * kPi * q * a.position.y);
    }
  }
  cplx operator()(int kx, int ky) const { return scale * fx[kx] * fy[ky]; }
};

// Inverse transform of a spectrum assembled on the grid. Nyquist bins are
// cleared: a real image cannot carry their phase.
RealField2 spectrum_to_image(ComplexField2& spectrum) {
  const Grid2& g = spectrum.grid();
  for (int ky = 0; ky < g.ny(); ++ky)
    for (int kx = 0; kx < g.nx(); ++kx)
      if (g.is_nyquist(kx, ky)) spectrum(kx, ky) = 0;
  return real_part(fft2_inverse(spectrum));
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Phantom rotated_or_same(const Phantom& p, double theta) { return theta == 0.0 ? p : rotate_y(p, theta); }

}  // namespace

std::string_view forward_model_name(ForwardModel m) {
  for (const auto& [model, name] : kModelNames)
    if (model == m) return name;
  return "unknown";
}

std::optional<ForwardModel> parse_forward_model(std::string_view name) {
  for (const auto& [model, n] : kModelNames)
    if (n == name) return model;
  return std::nullopt;
}

ContrastImage forward_thin(const RealField2& phase, const Beam& b, double distance) {
  double peak = 0;
  for (double v : phase.values()) peak = std::max(peak, std::abs(v));
  if (peak > kWeakPhaseLimit) {
    std::ostringstream os;
    os << "phase map reaches " << peak << " rad; weak-phase contrast is inaccurate above " << kWeakPhaseLimit;
    warn(os.str());
  }
  const Grid2& g = phase.grid();
  ComplexField2 spec = fft2_forward(phase);
  for (int ky = 0; ky < g.ny(); ++ky)
    for (int kx = 0; kx < g.nx(); ++kx)
      spec(kx, ky) *= 2.0 * kContrastSign * std::sin(kPi * b.lambda() * distance * g.q2(kx, ky));
  return ContrastImage{spectrum_to_image(spec), distance, 0.0, ForwardModel::born};
}

ContrastImage sliced_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                              int slices, SliceReference ref) {
  require(slices >= 1, ErrorCode::invalid_argument, "slice count must be >= 1");
  const Phantom rotated = rotated_or_same(p, theta);
  const Grid2& plane = g.plane();
  const double step = rotated.thickness() / slices;
  const double z_image = rotated.center_z() + defocus;
  const double inf = std::numeric_limits<double>::infinity();
  const double coef = 2.0 * kContrastSign * b.interaction();
  const double offset = ref == SliceReference::midpoint ? 0.5 * step : 0.0;

  ComplexField2 spec(plane);
  std::vector<std::pair<double, double>> terms;  // (slice weight, distance to image plane)
  for (const Atom& a : rotated.atoms()) {
    terms.clear();
    for (int m = 0; m < slices; ++m) {
      const double lo = m == 0 ? -inf : rotated.z0() + m * step;
      const double hi = m == slices - 1 ? inf : rotated.z0() + (m + 1) * step;
      const double w = atom_slab_weight(a, lo, hi);
      if (std::abs(w) > 1e-13 * a.amplitude * a.width)
        terms.emplace_back(w, z_image - (rotated.z0() + m * step + offset));
    }
    const TransverseFactor t(plane, a);
    for (int ky = 0; ky < plane.ny(); ++ky) {
      for (int kx = 0; kx < plane.nx(); ++kx) {
        const double chi = kPi * b.lambda() * plane.q2(kx, ky);
        double sum = 0;
        for (const auto& [w, dist] : terms) sum += w * std::sin(chi * dist);
        spec(kx, ky) += coef * sum * t(kx, ky);
      }
    }
  }
  return ContrastImage{spectrum_to_image(spec), defocus, theta, ForwardModel::sliced};
}

ContrastImage born_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus) {
  const Phantom rotated = rotated_or_same(p, theta);
  const Grid2& plane = g.plane();
  const double z_image = rotated.center_z() + defocus;
  const double coef = 2.0 * kContrastSign * b.interaction();
  ComplexField2 spec(plane);
  for (const Atom& a : rotated.atoms()) {
    const TransverseFactor t(plane, a);
    const double axial = a.amplitude * a.width * std::sqrt(2.0 * kPi);
    const double s2 = a.width * a.width;
    const double dist = z_image - a.position.z;
    for (int ky = 0; ky < plane.ny(); ++ky) {
      for (int kx = 0; kx < plane.nx(); ++kx) {
        const double chi = kPi * b.lambda() * plane.q2(kx, ky);
        spec(kx, ky) += coef * axial * std::exp(-0.5 * chi * chi * s2) * std::sin(chi * dist) * t(kx, ky);
      }
    }
  }
  return ContrastImage{spectrum_to_image(spec), defocus, theta, ForwardModel::born};
}

ContrastImage born_contrast_quadrature(const Phantom& p, const Grid3& g, const Beam& b, double theta,
                                       double defocus, int nodes_per_sigma) {
  const Phantom rotated = rotated_or_same(p, theta);
  const Grid2& plane = g.plane();
  const double z_image = rotated.center_z() + defocus;
  const double coef = 2.0 * kContrastSign * b.interaction();
  constexpr double kReach = 9.0;  // sigmas on each side
  std::vector<double> nodes, weights;
  gauss_legendre(static_cast<int>(2 * kReach) * nodes_per_sigma, nodes, weights);
  ComplexField2 spec(plane);
  for (const Atom& a : rotated.atoms()) {
    const TransverseFactor t(plane, a);
    const double half = kReach * a.width;
    for (int ky = 0; ky < plane.ny(); ++ky) {
      for (int kx = 0; kx < plane.nx(); ++kx) {
        const double chi = kPi * b.lambda() * plane.q2(kx, ky);
        double sum = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          const double u = half * nodes[i];
          sum += weights[i] * std::exp(-u * u / (2.0 * a.width * a.width)) *
                 std::sin(chi * (z_image - a.position.z - u));
        }
        spec(kx, ky) += coef * a.amplitude * half * sum * t(kx, ky);
      }
    }
  }
  return ContrastImage{spectrum_to_image(spec), defocus, theta, ForwardModel::born};
}

ContrastImage multislice_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                                  const MultisliceOptions& opts) {
  return ContrastImage{intensity_contrast(multislice(p, g, b, theta, defocus, opts)), defocus, theta,
                       ForwardModel::multislice};
}

ContrastImage projection_contrast(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus) {
  const Wavefield exit = projection_exit_wave(p, g, b, theta);
  return ContrastImage{intensity_contrast(propagate(exit, defocus)), defocus, theta, ForwardModel::projection};
}

ContrastImage per_atom_composite(const Phantom& p, const Grid3& g, const Beam& b, double theta, double defocus,
                                 const MultisliceOptions& opts) {
  ContrastImage out{RealField2(g.plane()), defocus, theta, ForwardModel::per_atom};
  for (const Atom& a : p.atoms()) {
    const Phantom single({a}, p.z0());
    const RealField2 k = intensity_contrast(multislice(single, g, b, theta, defocus, opts));
    for (std::size_t i = 0; i < k.size(); ++i) out.image[i] += k[i];
  }
  return out;
}

}  // namespace dtem
