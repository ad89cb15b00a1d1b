#include "dtem/dt_recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dtem/parallel.hpp"

namespace dtem {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap_index(long long i, int n) {
  const long long m = i % n;
  return static_cast<int>(m < 0 ? m + n : m);
}

// Centred zero padding by `factor`: the spectrum is then sampled on the
// oversampled reciprocal pitch in q_x and q_y alike.
RealField2 pad_image(const RealField2& f, int factor) {
  if (factor == 1) return f;
  const Grid2& g = f.grid();
  const Grid2 pg(g.nx() * factor, g.ny() * factor, g.dx(), g.dy());
  RealField2 out(pg);
  const int ox = pg.nx() / 2 - g.nx() / 2, oy = pg.ny() / 2 - g.ny() / 2;
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) out(ix + ox, iy + oy) = f(ix, iy);
  return out;
}

}  // namespace

cplx solve_paraboloid_sample(cplx k_spec, cplx kpi_spec_mirrored, double q_perp, double z, const Beam& b,
                             double eps) {
  if (z == 0.0) fail(ErrorCode::domain, "defocus z = 0: in-focus contrast of a phase object carries no signal");
  const double a = kPi * b.lambda() * z * q_perp * q_perp;
  const double s = std::sin(2.0 * a);
  const double denom = s * s + eps * eps;
  if (denom == 0.0) return 0.0;
  const cplx n = -(b.lambda() * b.volts() / (2.0 * kPi)) *
                 (std::polar(1.0, -a) * k_spec + std::polar(1.0, a) * kpi_spec_mirrored);
  return n * (s / denom);
}

Vec3 paraboloid_point(double qx, double qy, double theta, double lambda) {
  const double qz = -0.5 * lambda * (qx * qx + qy * qy);
  const double c = std::cos(theta), s = std::sin(theta);
  return Vec3{c * qx - s * qz, qy, s * qx + c * qz};
}

ParaboloidAccumulator::ParaboloidAccumulator(const Grid3& volume, const Beam& beam, const DtOptions& opts)
    : volume_(volume), beam_(beam), opts_(opts) {
  require(opts.oversample >= 1 && opts.oversample <= 4, ErrorCode::invalid_argument, "oversample must be 1..4");
  require(opts.eps >= 0, ErrorCode::invalid_argument, "eps must be >= 0");
  require(opts.band_fraction > 0 && opts.band_fraction <= 1, ErrorCode::invalid_argument,
          "band fraction must be in (0, 1]");
  require(opts.batch >= 1, ErrorCode::invalid_argument, "batch must be >= 1");
  const int n[3] = {volume.nx(), volume.ny(), volume.nz()};
  const double d[3] = {volume.dx(), volume.dy(), volume.dz()};
  for (int a = 0; a < 3; ++a) {
    dims_[a] = n[a] * opts.oversample;
    dq_[a] = 1.0 / (dims_[a] * d[a]);
  }
  band_ = opts.band_fraction * std::min({volume.plane().qmax_x(), volume.plane().qmax_y(), volume.qmax_z()});
  const std::size_t total = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  num_.assign(total, 0.0);
  den_.assign(total, 0.0);
  wsum_.assign(total, 0.0);
}

void ParaboloidAccumulator::collect(const PairRef& pair, std::vector<Sample>& out) const {
  const ComplexField2& k = *pair.k_spec;
  const ComplexField2& kpi = *pair.kpi_spec;
  const Grid2& g = k.grid();
  require(kpi.grid() == g, ErrorCode::mismatch, "paired images have different grids");
  if (pair.defocus == 0.0) fail(ErrorCode::domain, "defocus z = 0: diffraction tomography needs defocused images");
  const double image_band = opts_.band_fraction * std::min(g.qmax_x(), g.qmax_y());
  const double band = std::min(image_band, band_);
  const double scale = -beam_.lambda() * beam_.volts() / (2.0 * kPi);
  out.clear();
  for (int ky = 0; ky < g.ny(); ++ky) {
    for (int kx = 0; kx < g.nx(); ++kx) {
      if (g.is_nyquist(kx, ky)) continue;
      const double qx = g.qx(kx), qy = g.qy(ky);
      const double q2 = qx * qx + qy * qy;
      if (q2 > band * band) continue;
      const Vec3 q = paraboloid_point(qx, qy, pair.theta, beam_.lambda());
      if (q.x * q.x + q.y * q.y + q.z * q.z > band_ * band_) continue;
      const double a = kPi * beam_.lambda() * pair.defocus * q2;
      const cplx n = scale * (std::polar(1.0, -a) * k(kx, ky) + std::polar(1.0, a) * kpi(g.mirror_x(kx), ky));
      out.push_back(Sample{q, n, std::sin(2.0 * a)});
    }
  }
}

void ParaboloidAccumulator::spread(const std::vector<std::vector<Sample>>& batches) {
  // Each worker owns a contiguous range of kz planes and walks every sample
  // in the same order, so each node sees the same summation sequence for any
  // thread count.
  const int workers = std::min(resolve_threads(opts_.threads), dims_[2]);
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    const int z_lo = static_cast<int>(dims_[2] * w / workers);
    const int z_hi = static_cast<int>(dims_[2] * (w + 1) / workers);
    for (const auto& samples : batches) {
      for (const Sample& smp : samples) {
        const double u[3] = {smp.q.x / dq_[0], smp.q.y / dq_[1], smp.q.z / dq_[2]};
        long long base[3];
        double frac[3];
        for (int a = 0; a < 3; ++a) {
          base[a] = static_cast<long long>(std::floor(u[a]));
          frac[a] = u[a] - static_cast<double>(base[a]);
        }
        const cplx sn = smp.s * smp.numerator;
        const double s2 = smp.s * smp.s;
        for (int cz = 0; cz < 2; ++cz) {
          const int iz = wrap_index(base[2] + cz, dims_[2]);
          if (iz < z_lo || iz >= z_hi) continue;
          const double wz = cz ? frac[2] : 1.0 - frac[2];
          for (int cy = 0; cy < 2; ++cy) {
            const int iy = wrap_index(base[1] + cy, dims_[1]);
            const double wyz = wz * (cy ? frac[1] : 1.0 - frac[1]);
            for (int cx = 0; cx < 2; ++cx) {
              const int ix = wrap_index(base[0] + cx, dims_[0]);
              const double t = wyz * (cx ? frac[0] : 1.0 - frac[0]);
              if (t == 0.0) continue;
              const std::size_t id = node(ix, iy, iz);
              num_[id] += t * sn;
              den_[id] += t * s2;
              wsum_[id] += t;
            }
          }
        }
      }
    }
  });
}

void ParaboloidAccumulator::add_pair(const ComplexField2& k_spec, const ComplexField2& kpi_spec, double theta,
                                     double defocus) {
  add_pairs({PairRef{&k_spec, &kpi_spec, theta, defocus}});
}

void ParaboloidAccumulator::add_pairs(const std::vector<PairRef>& pairs) {
  std::vector<std::vector<Sample>> samples(pairs.size());
  parallel_for(pairs.size(), opts_.threads, [&](std::size_t i) { collect(pairs[i], samples[i]); });
  spread(samples);
}

void ParaboloidAccumulator::deposit(const Vec3& q, cplx value) {
  spread({{Sample{q, value, 1.0}}});
}

cplx ParaboloidAccumulator::value(int kx, int ky, int kz) const {
  const std::size_t id = node(kx, ky, kz);
  const double denom = den_[id] + opts_.eps * opts_.eps * wsum_[id];
  return denom > 0 ? num_[id] / denom : cplx(0.0);
}

double ParaboloidAccumulator::weight(int kx, int ky, int kz) const { return wsum_[node(kx, ky, kz)]; }

double ParaboloidAccumulator::coverage() const {
  std::size_t inside = 0, hit = 0;
  for (int kz = 0; kz < dims_[2]; ++kz) {
    const double qz = wrap_index(kz + dims_[2] / 2, dims_[2]) - dims_[2] / 2;
    for (int ky = 0; ky < dims_[1]; ++ky) {
      const double qy = wrap_index(ky + dims_[1] / 2, dims_[1]) - dims_[1] / 2;
      for (int kx = 0; kx < dims_[0]; ++kx) {
        const double qx = wrap_index(kx + dims_[0] / 2, dims_[0]) - dims_[0] / 2;
        const double r2 = std::pow(qx * dq_[0], 2) + std::pow(qy * dq_[1], 2) + std::pow(qz * dq_[2], 2);
        if (r2 > band_ * band_) continue;
        ++inside;
        if (wsum_[node(kx, ky, kz)] > 0) ++hit;
      }
    }
  }
  return inside ? static_cast<double>(hit) / inside : 0.0;
}

std::vector<std::uint8_t> ParaboloidAccumulator::coverage_mask() const {
  std::vector<std::uint8_t> mask(wsum_.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = wsum_[i] > 0 ? 1 : 0;
  return mask;
}

DtResult invert_to_volume(const ParaboloidAccumulator& acc) {
  DtResult out;
  out.coverage = acc.coverage();
  if (out.coverage < acc.options().min_coverage) {
    std::ostringstream os;
    os << "reciprocal coverage " << out.coverage << " below threshold " << acc.options().min_coverage
       << ": uncovered fraction of the band-limited ball is " << 1.0 - out.coverage;
    fail(ErrorCode::coverage, os.str());
  }
  const Grid3& vg = acc.volume_grid();
  const int nx = acc.n(0), ny = acc.n(1), nz = acc.n(2);
  const Grid3 padded(Grid2(nx, ny, vg.dx(), vg.dy()), nz, vg.dz(), vg.z0());
  ComplexVolume3 spec(padded);
  for (int kz = 0; kz < nz; ++kz)
    for (int ky = 0; ky < ny; ++ky)
      for (int kx = 0; kx < nx; ++kx) spec(kx, ky, kz) = acc.value(kx, ky, kz);
  const ComplexVolume3 full = fft3_inverse(spec);

  out.volume = Volume3(vg);
  const int ox = (nx - vg.nx()) / 2, oy = (ny - vg.ny()) / 2, oz = (nz - vg.nz()) / 2;
  double re2 = 0, im2 = 0;
  for (int iz = 0; iz < vg.nz(); ++iz)
    for (int iy = 0; iy < vg.ny(); ++iy)
      for (int ix = 0; ix < vg.nx(); ++ix) {
        const cplx v = full(ix + ox, iy + oy, iz + oz);
        out.volume(ix, iy, iz) = v.real();
        re2 += v.real() * v.real();
        im2 += v.imag() * v.imag();
      }
  out.imaginary_residual = re2 > 0 ? std::sqrt(im2 / re2) : 0.0;
  out.coverage_mask = acc.coverage_mask();
  out.mask_dims[0] = nx;
  out.mask_dims[1] = ny;
  out.mask_dims[2] = nz;
  return out;
}

DtResult dt_reconstruct(const std::vector<const ProjectionSet*>& sets, const Grid3& volume, const DtOptions& opts) {
  require(!sets.empty(), ErrorCode::invalid_argument, "no projection sets given");
  const Beam& beam = sets.front()->beam;
  ParaboloidAccumulator acc(volume, beam, opts);
  for (const ProjectionSet* ps : sets) {
    ps->validate();
    require(ps->beam == beam, ErrorCode::mismatch, "projection sets were recorded with different beams");
    const auto partner = partner_indices(ps->angles);
    const std::size_t n = ps->size();
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(opts.batch)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(opts.batch));
      std::vector<ComplexField2> spec(2 * (stop - start));
      parallel_for(spec.size(), opts.threads, [&](std::size_t k) {
        const std::size_t i = start + k / 2;
        spec[k] = fft2_forward(pad_image(ps->images[k % 2 == 0 ? i : partner[i]], opts.oversample));
      });
      std::vector<ParaboloidAccumulator::PairRef> pairs;
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t k = 2 * (i - start);
        pairs.push_back({&spec[k], &spec[k + 1], ps->angles[i], ps->defocus});
      }
      acc.add_pairs(pairs);
    }
  }
  return invert_to_volume(acc);
}

DtResult dt_reconstruct(const ProjectionSet& set, const Grid3& volume, const DtOptions& opts) {
  return dt_reconstruct(std::vector<const ProjectionSet*>{&set}, volume, opts);
}

}  // namespace dtem
