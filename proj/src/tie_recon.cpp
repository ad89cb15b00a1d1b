#include "dtem/tie_recon.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dtem/parallel.hpp"

namespace dtem {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0 ? a + 2.0 * kPi : a;
}

int padded_size(int n, double fraction) {
  const int extra = static_cast<int>(std::lround(n * fraction));
  return n + extra + (extra % 2);
}

}  // namespace

SymmetrizedContrast symmetrize(const ContrastImage& k_theta, const ContrastImage& k_theta_pi) {
  require(k_theta.image.grid() == k_theta_pi.image.grid(), ErrorCode::mismatch,
          "symmetrize: the two images have different grids");
  require(k_theta.defocus == k_theta_pi.defocus, ErrorCode::mismatch,
          "symmetrize: the two images have different defocus");
  const double d = wrap_angle(k_theta_pi.theta - k_theta.theta);
  if (std::abs(d - kPi) > 1e-9) {
    std::ostringstream os;
    os << "symmetrize: angles " << k_theta.theta << " and " << k_theta_pi.theta << " do not differ by pi";
    fail(ErrorCode::mismatch, os.str());
  }
  SymmetrizedContrast out{mirror_x(k_theta_pi.image), k_theta.theta, k_theta.defocus};
  for (std::size_t i = 0; i < out.image.size(); ++i) out.image[i] = 0.5 * (k_theta.image[i] + out.image[i]);
  return out;
}

double default_tie_alpha(const Grid2& g) {
  const double qmax = std::min(g.qmax_x(), g.qmax_y());
  return 1e-6 * 4.0 * kPi * kPi * qmax * qmax;
}

RealField2 tie_phase(const SymmetrizedContrast& ks, const Beam& b, const TieOptions& opts) {
  if (ks.defocus == 0.0) fail(ErrorCode::domain, "TIE phase retrieval needs a nonzero defocus");
  require(opts.pad_fraction >= 0, ErrorCode::invalid_argument, "pad fraction must be >= 0");
  const Grid2& g = ks.image.grid();
  const double alpha = opts.alpha < 0 ? default_tie_alpha(g) : opts.alpha;
  const double scale = 2.0 * kPi / (b.lambda() * ks.defocus);

  const int px = padded_size(g.nx(), opts.pad_fraction), py = padded_size(g.ny(), opts.pad_fraction);
  const Grid2 pg(px, py, g.dx(), g.dy());
  // Centred embedding keeps x = 0 on x = 0.
  const int ox = px / 2 - g.nx() / 2, oy = py / 2 - g.ny() / 2;
  RealField2 padded(pg);
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) padded(ix + ox, iy + oy) = ks.image(ix, iy);
  const RealField2 lap = inverse_laplacian_2d(padded, alpha);
  RealField2 out(g);
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) out(ix, iy) = scale * lap(ix + ox, iy + oy);
  return out;
}

RealField2 phase_to_line_integral(const RealField2& phase, const Beam& b) {
  RealField2 out = phase;
  const double k = 1.0 / b.interaction();
  for (auto& v : out.values()) v *= k;
  return out;
}

Volume3 tie_dt_pipeline(const ProjectionSet& ps, const Grid3& volume, const TieOptions& opts) {
  ps.validate();
  if (ps.defocus == 0.0) fail(ErrorCode::domain, "TIE-DT needs a nonzero defocus");
  const auto partner = partner_indices(ps.angles);
  require_uniform_angles(ps.angles);
  std::vector<RealField2> lines(ps.size());
  parallel_for(ps.size(), opts.fbp.threads, [&](std::size_t i) {
    const SymmetrizedContrast ks = symmetrize(ps.image(i), ps.image(partner[i]));
    lines[i] = phase_to_line_integral(tie_phase(ks, ps.beam, opts), ps.beam);
  });
  return fbp_reconstruct(lines, ps.angles, volume, opts.fbp);
}

}  // namespace dtem
