#include "mbs/model.hpp"

#include <cmath>
#include <sstream>

#include "mbs/errors.hpp"

namespace mbs {

namespace {

void require(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << "geometry invariant violated: " << what << " (got " << value << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

Geometry make_geometry(double theta0, double theta, double phi, double k,
                       double h, double L, double c_light) {
  require(std::isfinite(theta0) && theta0 > 0.0 && theta0 < 0.2,
          "0 < theta0 < 0.2 rad", theta0);
  require(std::isfinite(theta) && theta > 0.0 && theta < 0.2,
          "0 < theta < 0.2 rad", theta);
  require(std::isfinite(phi), "phi finite", phi);
  require(std::isfinite(k) && k > 0.0, "k > 0", k);
  require(std::isfinite(h) && h > 0.0, "h > 0", h);
  require(std::isfinite(L) && L >= 0.0, "L >= 0", L);
  require(std::isfinite(c_light) && c_light > 0.0, "c_light > 0", c_light);
  return Geometry{theta0, theta, phi, k, h, L, c_light};
}

void validate_cloud(const CloudSpec& cloud) {
  if (cloud.n_atoms < 1) throw DomainError("cloud invariant violated: n_atoms >= 1");
  if (!(cloud.s_r > 0.0) || !std::isfinite(cloud.s_r))
    throw DomainError("cloud invariant violated: s_r > 0");
  if (!(cloud.s_z > 0.0) || !std::isfinite(cloud.s_z))
    throw DomainError("cloud invariant violated: s_z > 0");
}

void validate_drive(const DriveSpec& drive) {
  if (!(drive.s0 >= 0.0) || !std::isfinite(drive.s0))
    throw DomainError("drive invariant violated: s0 >= 0");
  if (!(drive.Gamma > 0.0)) throw DomainError("drive invariant violated: Gamma > 0");
  if (!std::isfinite(drive.gamma_wp))
    throw DomainError("drive invariant violated: gamma_wp finite");
}

double tau_c(const Geometry& geom, double z, TauMode mode) {
  if (mode == TauMode::cloud_mean) return 2.0 * geom.L / geom.c_light;
  return 2.0 * (z * std::cos(geom.theta) + geom.L) / geom.c_light;
}

}  // namespace mbs
