// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtem/born_forward.hpp"
#include "dtem/ct_baseline.hpp"
#include "dtem/dt_recon.hpp"
#include "dtem/fbp.hpp"
#include "dtem/metrics.hpp"
#include "dtem/pipeline.hpp"
#include "dtem/simulate.hpp"
#include "dtem/tie_recon.hpp"

using namespace dtem;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const Beam kBeam = Beam::from_voltage(200e3);

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_rms_diff(const RealField2& a, const RealField2& b) {
  double d = 0, n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += std::pow(a[i] - b[i], 2);
    n += a[i] * a[i];
  }
  return n > 0 ? std::sqrt(d / n) : std::sqrt(d);
}

Outcome wavelength() {
  const double l = electron_wavelength(200e3);
  return {std::abs(l / 0.025 - 1) < 0.01 && std::abs(l - 0.02508) < 5e-6, fmt("lambda = %.6f A", l)};
}

Outcome fresnel() {
  const double n = fresnel_number(1.0, 0.025, 100.0);
  return {std::abs(n - 0.4) < 1e-15, fmt("N_F = %.17g", n)};
}

Outcome paraboloid_exactness() {
  const Grid3 g(Grid2(128, 128, 0.25, 0.25), 128, 0.5, -64.0);
  const Phantom p({Atom{{1.0, 0, -22.0}, 50, 0.8}, Atom{{-1.5, 1.0, -37.0}, 50, 0.8}, Atom{{0.0, -2.0, -43.0}, 50, 0.8}},
                  -64.0);
  const Grid2& pl = g.plane();
  double worst = 0;
  long used = 0;
  for (double theta : {0.0, 0.7, 2.5})
    for (double z : {45.0, 10.0}) {
      const ComplexField2 k = fft2_forward(born_contrast(p, g, kBeam, theta, z).image);
      const ComplexField2 kpi = fft2_forward(born_contrast(p, g, kBeam, theta + kPi, z).image);
      double err = 0, ref = 0;
      for (int ky = 0; ky < pl.ny(); ++ky)
        for (int kx = 0; kx < pl.nx(); ++kx) {
          const double q2 = pl.q2(kx, ky);
          if (pl.is_nyquist(kx, ky) || std::abs(std::sin(2 * kPi * kBeam.lambda() * z * q2)) <= 0.1) continue;
          const cplx v = solve_paraboloid_sample(k(kx, ky), kpi(pl.mirror_x(kx), ky), std::sqrt(q2), z, kBeam, 0.0);
          const cplx want = analytic_ft3(p, paraboloid_point(pl.qx(kx), pl.qy(ky), theta, kBeam.lambda()));
          err = std::max(err, std::abs(v - want));
          ref = std::max(ref, std::abs(want));
          ++used;
        }
      worst = std::max(worst, err / ref);
    }
  return {worst < 1e-6 && used > 0, fmt("max relative error %.3g over %ld samples", worst, used)};
}

Outcome tie_limit() {
  // Depth-symmetric object viewed along its symmetry axis.
  const Grid3 g(Grid2(64, 64, 0.5, 0.5), 64, 0.5, -32.0);
  const Phantom p({Atom{{2.0, 1.0, -22.0}, 50, 0.8}, Atom{{2.0, 1.0, -10.0}, 50, 0.8}, Atom{{-3.0, -1.5, -16.0}, 50, 0.8}},
                  -32.0);
  const Grid2& pl = g.plane();
  const std::vector<double> zs{5.0, 10.0, 20.0, 40.0};
  auto usable = [&](int kx, int ky) {
    if (pl.is_nyquist(kx, ky) || pl.q2(kx, ky) == 0) return false;
    for (double z : zs)
      if (std::abs(std::sin(2 * kPi * kBeam.lambda() * z * pl.q2(kx, ky))) <= 0.1) return false;
    return true;
  };
  TieOptions o;
  o.alpha = 0;
  o.pad_fraction = 0;
  std::vector<double> x, y;
  for (double z : zs) {
    const ContrastImage k = born_contrast(p, g, kBeam, 0.0, z);
    const ContrastImage kpi = born_contrast(p, g, kBeam, kPi, z);
    const ComplexField2 ks = fft2_forward(k.image), kpis = fft2_forward(kpi.image);
    const ComplexField2 tie = fft2_forward(phase_to_line_integral(tie_phase(symmetrize(k, kpi), kBeam, o), kBeam));
    double sum = 0;
    for (int ky = 0; ky < pl.ny(); ++ky)
      for (int kx = 0; kx < pl.nx(); ++kx) {
        if (!usable(kx, ky)) continue;
        const cplx dt =
            solve_paraboloid_sample(ks(kx, ky), kpis(pl.mirror_x(kx), ky), std::sqrt(pl.q2(kx, ky)), z, kBeam, 0);
        sum += std::norm(tie(kx, ky) - dt);
      }
    x.push_back(std::log(z));
    y.push_back(std::log(std::sqrt(sum)));
  }
  // Least-squares slope over the sweep.
  const double mx = (x[0] + x[1] + x[2] + x[3]) / 4, my = (y[0] + y[1] + y[2] + y[3]) / 4;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 4; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {std::abs(slope - 2) <= 0.3, fmt("log-log slope %.3f", slope)};
}

Outcome orientation_asymmetry() {
  const Grid3 g(Grid2(128, 128, 0.25, 0.25), 120, 0.5, -60.0);
  const Phantom p({Atom{{2.0, 0, -15.0}, 50, 0.8}, Atom{{-2.0, 0, -45.0}, 50, 0.8}}, -60.0);
  const auto stat = [&](bool ms) {
    const auto image = [&](double theta) {
      return ms ? multislice_contrast(p, g, kBeam, theta, 45.0).image : projection_contrast(p, g, kBeam, theta, 45.0).image;
    };
    return rel_rms_diff(image(0.0), mirror_x(image(kPi)));
  };
  const double ms = stat(true), proj = stat(false);
  return {proj < 1e-10 && ms > 10 * proj, fmt("multislice %.4f, projection %.3g", ms, proj)};
}

Outcome model_error_ordering() {
  RandomPhantomSpec s;
  s.count = 20;
  s.slab_thickness = 80;
  s.half_width_x = s.half_width_y = 12;
  s.seed = 1;
  const Phantom p = random_phantom(s);
  const Grid3 g(Grid2(128, 128, 0.25, 0.25), 160, 0.5, p.z0());
  const RealField2 ms = multislice_contrast(p, g, kBeam, 0.0, 45.0).image;
  const ErrorReport proj = image_error(projection_contrast(p, g, kBeam, 0.0, 45.0).image, ms);
  const ErrorReport atom = image_error(per_atom_composite(p, g, kBeam, 0.0, 45.0).image, ms);
  const double ratio = proj.mean_percent / atom.mean_percent;
  return {proj.mean_percent > atom.mean_percent && ratio > 3,
          fmt("projection %.4f%% (max %.2f%%), per-atom %.5f%% (max %.3f%%), ratio %.1f", proj.mean_percent,
              proj.max_percent, atom.mean_percent, atom.max_percent, ratio)};
}

Outcome ct_versus_tie() {
  const int n = 128;
  const double dx = 0.5, side = n * dx;
  RandomPhantomSpec s;
  s.count = 8;
  s.slab_thickness = side;
  s.half_width_x = s.half_width_y = s.cylinder_radius = side / 2 - 4;
  s.seed = 7;
  const Phantom p = random_phantom(s);
  const Grid3 g(Grid2(n, n, dx, dx), n, dx, p.z0());
  const auto angles = uniform_angles(720);
  const auto [raw, ctf] = simulate_multislice_with_ctf(p, g, kBeam, angles, 45.0);
  const ProjectionSet phase = simulate_projection_set(p, g, kBeam, ForwardModel::phase, angles, 0.0);
  const Volume3 truth = potential_on_grid(p, g);
  const ErrorReport ci = volume_error(ct_pipeline(ctf, g, CtMode::intensity_as_projection), truth, &p);
  const ErrorReport ct = volume_error(ct_pipeline(phase, g, CtMode::true_phase), truth, &p);
  const ErrorReport tie = volume_error(tie_dt_pipeline(raw, g), truth, &p);
  const auto count = [](const ErrorReport& r, bool positive) {
    int c = 0;
    for (double v : r.site_peaks) c += positive ? v > 0 : v < 0;
    return c;
  };
  const int sites = static_cast<int>(p.atoms().size());
  const bool a = count(ci, false) >= 1;
  const bool b = count(ct, true) == sites && ct.rms_over_peak < 0.02;
  const bool c = count(tie, true) == sites && tie.correlation >= 0.95 && tie.rms < ci.rms;
  return {a && b && c,
          fmt("(a) %s: %d/%d negative sites; (b) %s: %d/%d positive, rms %.2f%% of peak; (c) %s: %d/%d positive, "
              "corr %.4f, rms %.4g vs ct-intensity %.4g",
              a ? "ok" : "no", count(ci, false), sites, b ? "ok" : "no", count(ct, true), sites,
              100 * ct.rms_over_peak, c ? "ok" : "no", count(tie, true), sites, tie.correlation, tie.rms, ci.rms)};
}

Outcome unitarity() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int call = 0; call < 100; ++call) {
    const int n = 16 << (call % 3);
    const Grid2 plane(n, n, 0.25 + 0.25 * (call % 4), 0.25 + 0.25 * (call % 4));
    Wavefield w = plane_wave(plane, kBeam, 0.0);
    for (auto& v : w.field.values()) v = cplx(1 + 0.5 * u(rng), 0.5 * u(rng));
    double before = 0, after = 0;
    for (const auto& v : w.field.values()) before += std::norm(v);
    const Wavefield out = propagate(w, 500 * u(rng), call % 2 ? PropagatorKind::exact : PropagatorKind::paraxial);
    for (const auto& v : out.field.values()) after += std::norm(v);
    worst = std::max(worst, std::abs(after / before - 1));
  }
  return {worst < 1e-10, fmt("worst relative change in mean intensity %.3g", worst)};
}

Outcome fbp_control() {
  const Grid3 vol(Grid2(128, 2, 0.25, 0.25), 128, 0.25, -32.0);
  const double s = 2.0;
  const auto angles = uniform_angles(1800);
  RealField2 p(vol.plane());
  for (int iy = 0; iy < 2; ++iy)
    for (int ix = 0; ix < 128; ++ix)
      p(ix, iy) = s * std::sqrt(2 * kPi) * std::exp(-std::pow(vol.plane().x(ix), 2) / (2 * s * s));
  const Volume3 v = fbp_reconstruct(std::vector<RealField2>(angles.size(), p), angles, vol);
  double e2 = 0, t2 = 0;
  for (int iz = 0; iz < 128; ++iz)
    for (int ix = 0; ix < 128; ++ix) {
      const double x = vol.plane().x(ix), w = vol.z_rel(iz);
      if (x * x + w * w > 12.0 * 12.0) continue;
      const double want = std::exp(-(x * x + w * w) / (2 * s * s));
      e2 += std::pow(v(ix, 0, iz) - want, 2);
      t2 += want * want;
    }
  const double rms = std::sqrt(e2 / t2);
  return {rms < 0.01, fmt("interior relative RMS %.4f%%", 100 * rms)};
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every produced binary artifact, keyed by its path inside the run tree.
std::vector<std::pair<std::string, std::string>> artifacts(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && (e.path().extension() == ".f64" || e.path().extension() == ".u8")) files.insert(e.path());
  for (const auto& f : files) out.emplace_back(fs::relative(f, root).string(), file_bytes(f));
  return out;
}

Outcome determinism(const fs::path& work) {
  const auto run = [&](int threads) {
    const fs::path root = work / ("threads_" + std::to_string(threads));
    fs::remove_all(root);
    RunConfig c;
    c.nx = c.ny = c.nz = 48;
    c.angle_count = 60;
    c.random.count = 4;
    c.random.slab_thickness = 20;
    c.random.half_width_x = c.random.half_width_y = 8;
    c.random.cylinder_radius = 9;
    c.seed = c.random.seed = 11;
    c.threads = threads;
    c.min_coverage = 0;
    c.write_phase = true;
    for (ForwardModel m : {ForwardModel::born, ForwardModel::multislice}) {
      c.model = m;
      run_simulate(c, root / forward_model_name(m));
    }
    const fs::path born = root / "born" / "sets", ms = root / "multislice" / "sets";
    c.method = ReconMethod::dt;
    run_reconstruct(c, {born / "born_z45"}, root / "rec_dt");
    c.method = ReconMethod::tie_dt;
    run_reconstruct(c, {ms / "multislice_z45"}, root / "rec_tie");
    c.method = ReconMethod::ct;
    c.defocus = {0};
    run_reconstruct(c, {ms / "multislice_ctf"}, root / "rec_ct");
    c.ct_mode = CtMode::true_phase;
    run_reconstruct(c, {ms / "phase"}, root / "rec_phase");
    return artifacts(root);
  };
  const auto a = run(1), b = run(3);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) differing += a[i] != b[i];
  const bool ok = a.size() == b.size() && differing == 0 && !a.empty();
  fs::remove_all(work / "threads_1");
  fs::remove_all(work / "threads_3");
  return {ok, fmt("%zu artifacts at 1 thread, %zu at 3 threads, %zu differ", a.size(), b.size(), differing)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / "dtem_acceptance").string();
  app.add_option("criteria", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"electron wavelength at 200 kV", wavelength},
      {"Fresnel number", fresnel},
      {"paraboloid solution exactness", paraboloid_exactness},
      {"TIE small-defocus limit", tie_limit},
      {"opposite-orientation asymmetry", orientation_asymmetry},
      {"model error ordering", model_error_ordering},
      {"CT vs TIE-DT artefacts", ct_versus_tie},
      {"propagator unitarity", unitarity},
      {"filtered back-projection control", fbp_control},
      {"thread-count determinism", [&] { return determinism(work); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures;
}
