#include "dtem/grid.hpp"

#include <cmath>
#include <sstream>

namespace dtem {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::domain: return "domain";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::mismatch: return "mismatch";
    case ErrorCode::io: return "io";
    case ErrorCode::coverage: return "coverage";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

Grid2::Grid2(int nx, int ny, double dx, double dy) : nx_(nx), ny_(ny), dx_(dx), dy_(dy) {
  if (nx < 2 || ny < 2 || nx % 2 != 0 || ny % 2 != 0) {
    std::ostringstream os;
    os << "grid sizes must be even and >= 2, got " << nx << "x" << ny;
    fail(ErrorCode::invalid_argument, os.str());
  }
  require(dx > 0 && dy > 0 && std::isfinite(dx) && std::isfinite(dy), ErrorCode::invalid_argument,
          "pixel sizes must be positive");
}

Grid3::Grid3(const Grid2& plane, int nz, double dz, double z0) : plane_(plane), nz_(nz), dz_(dz), z0_(z0) {
  require(nz >= 2 && nz % 2 == 0, ErrorCode::invalid_argument, "nz must be even and >= 2");
  require(dz > 0, ErrorCode::invalid_argument, "dz must be positive");
  require(z0 < 0, ErrorCode::invalid_argument, "slab origin z0 must be negative");
  if (nz * dz < -z0 * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "slab of thickness " << -z0 << " A does not fit nz*dz = " << nz * dz << " A";
    fail(ErrorCode::invalid_argument, os.str());
  }
}

ComplexField2 to_complex(const RealField2& f) {
  ComplexField2 out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

RealField2 real_part(const ComplexField2& f) {
  RealField2 out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

RealField2 mirror_x(const RealField2& f) {
  const Grid2& g = f.grid();
  RealField2 out(g);
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) out(ix, iy) = f(g.mirror_x(ix), iy);
  return out;
}

}  // namespace dtem
