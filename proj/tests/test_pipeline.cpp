#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "dtem/pipeline.hpp"
#include "dtem/projection_set.hpp"

using namespace dtem;
namespace fs = std::filesystem;

namespace {

KeyValueFile parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueFile::parse(in);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dtem_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config() {
  RunConfig c;
  c.nx = c.ny = c.nz = 32;
  c.angle_count = 8;
  c.random.count = 2;
  c.random.slab_thickness = 12;
  c.random.half_width_x = c.random.half_width_y = 4;
  c.random.cylinder_radius = 6;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("run configuration") {
  SUBCASE("defaults round trip") {
    const RunConfig c = parse_run_config(KeyValueFile{});
    CHECK(c.method == ReconMethod::tie_dt);
    CHECK(c.angle_count == 720);
    const RunConfig back = parse_run_config(c.to_key_values());
    CHECK(back.to_key_values().keys() == c.to_key_values().keys());
    for (const auto& k : c.to_key_values().keys()) CHECK(back.to_key_values().get(k) == c.to_key_values().get(k));
  }
  SUBCASE("sections") {
    const RunConfig c = parse_run_config(parse("[grid]\nnx = 64\n[scan]\ndefocus = 10 45\nmodel = multislice\n"
                                               "[recon]\nmethod = dt\n"));
    CHECK(c.nx == 64);
    CHECK(c.defocus == std::vector<double>{10, 45});
    CHECK(c.model == ForwardModel::multislice);
    CHECK(c.method == ReconMethod::dt);
  }
  SUBCASE("rejections") {
    const auto code = [](const std::string& text) {
      try {
        parse_run_config(parse(text));
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::ok;
    };
    CHECK(code("grid.nxx = 4\n") == ErrorCode::invalid_argument);
    CHECK(code("grid.nx = 33\n") == ErrorCode::invalid_argument);
    CHECK(code("grid.nx = many\n") == ErrorCode::invalid_argument);
    CHECK(code("scan.model = wave\n") == ErrorCode::invalid_argument);
    CHECK(code("scan.defocus = 0\n") == ErrorCode::invalid_argument);
    CHECK(code("scan.defocus = 0\nrecon.method = ct\n") == ErrorCode::ok);
    CHECK(code("scan.range_deg = 400\n") == ErrorCode::invalid_argument);
    CHECK(code("run.seed = -1\n") == ErrorCode::invalid_argument);
  }
  SUBCASE("scan angles always carry partners") {
    RunConfig c;
    c.angle_count = 7;
    const auto odd = scan_angles(c);
    CHECK(odd.size() == 14);
    CHECK_NOTHROW(partner_indices(odd));
    c.angle_count = 6;
    c.range_deg = 180;
    const auto half = scan_angles(c);
    CHECK(half.size() == 12);
    CHECK_NOTHROW(partner_indices(half));
    c.angle_count = 8;
    c.range_deg = 360;
    CHECK(scan_angles(c) == uniform_angles(8));
  }
}

TEST_CASE("simulate and reconstruct runs") {
  const fs::path root = scratch("pipeline");
  RunConfig c = small_config();
  c.model = ForwardModel::born;
  c.defocus = {20, 45};
  c.write_phase = true;
  const auto sets = run_simulate(c, root / "sim");
  REQUIRE(sets.size() == 3);
  CHECK(fs::exists(root / "sim" / "sets" / "born_z20" / "metadata.txt"));
  CHECK(fs::exists(root / "sim" / "sets" / "phase" / "metadata.txt"));
  CHECK(fs::exists(root / "sim" / "run.txt"));
  CHECK(load_run_config(root / "sim" / "config.txt").defocus == c.defocus);
  const ProjectionSet ps = read_projection_set(sets[0]);
  CHECK(ps.size() == 8);
  CHECK(ps.defocus == 20);

  SUBCASE("dt with both defocus values and a report") {
    RunConfig r = c;
    r.method = ReconMethod::dt;
    r.min_coverage = 0;
    const auto outcome = run_reconstruct(r, {sets[0], sets[1]}, root / "dt");
    CHECK(outcome.has_report);
    CHECK(fs::exists(root / "dt" / "report.kv"));
    const VolumeFile vf = read_volume(root / "dt");
    CHECK(vf.method == "dt");
    CHECK(vf.volume.values() == outcome.volume.volume.values());
    CHECK_FALSE(vf.coverage_mask.empty());
  }
  SUBCASE("tie_dt takes one set") {
    const auto outcome = run_reconstruct(c, {sets[1]}, root / "tie");
    CHECK(outcome.report.correlation > 0.3);
    CHECK_THROWS_AS(run_reconstruct(c, {sets[0], sets[1]}, root / "tie2"), Error);
  }
  SUBCASE("ct true phase and model checks") {
    RunConfig r = c;
    r.method = ReconMethod::ct;
    r.ct_mode = CtMode::true_phase;
    r.defocus = {0};
    CHECK(run_reconstruct(r, {sets[2]}, root / "ct").has_report);
    CHECK_THROWS_AS(run_reconstruct(r, {sets[0]}, root / "ct2"), Error);
  }
  SUBCASE("grid mismatch") {
    RunConfig r = c;
    r.nx = 64;
    try {
      run_reconstruct(r, {sets[1]}, root / "bad");
      FAIL("expected a mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::mismatch);
    }
  }
  SUBCASE("figures") {
    const auto files = run_figures({root / "sim"}, root / "fig");
    CHECK(files.size() >= 3);
    CHECK(fs::exists(root / "fig" / "fig2_sim.txt"));
    CHECK_THROWS_AS(run_figures({}, root / "fig"), Error);
    CHECK_THROWS_AS(run_figures({root / "nothing"}, root / "fig"), Error);
  }
  fs::remove_all(root);
}

TEST_CASE("simulation refuses a rotation radius beyond the grid") {
  RunConfig c = small_config();
  c.random.cylinder_radius = 12;
  c.random.half_width_x = 12;
  c.random.count = 1;
  const fs::path root = scratch("radius");
  CHECK_THROWS_AS(run_simulate(c, root), Error);
  fs::remove_all(root);
}
