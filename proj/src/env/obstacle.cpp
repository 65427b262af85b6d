#include "steap/env/obstacle.hpp"

#include <limits>
#include <stdexcept>

namespace steap::env {

void HingeLossParams::validate() const {
  if (!(eps >= 0.0)) throw std::invalid_argument("hinge eps must be non-negative");
  if (!(sigma_obs > 0.0)) throw std::invalid_argument("sigma_obs must be positive");
}

Vector obstacle_error(const MobileConfig& config, const BodyModel& body,
                      const SignedDistanceField& sdf, const HingeLossParams& params,
                      Matrix* d_config) {
  const SphereKinematics fk = forward_kinematics(config, body, d_config != nullptr);
  const auto n = static_cast<int>(body.spheres.size());
  Vector err(n);
  if (d_config) d_config->setZero(n, config.tangent_dim());
  for (int k = 0; k < n; ++k) {
    const SdfSample s = sdf.query(fk.centers[k]);
    const double d = s.distance - body.spheres[k].radius;
    err(k) = hinge_loss(d, params.eps);
    if (d_config && d < params.eps) {
      d_config->row(k) = -s.gradient.transpose() * fk.jacobians[k];
    }
  }
  return err;
}

Vector interp_obstacle_error(const MarkovState& state_i, const MarkovState& state_next,
                             const gp::GpInterpCoeffs& coeffs, const BodyModel& body,
                             const SignedDistanceField& sdf, const HingeLossParams& params,
                             Matrix* d_state_i, Matrix* d_state_next) {
  const bool want = d_state_i || d_state_next;
  Matrix di, dn;
  const MobileConfig c = gp::interpolate_config(state_i, state_next, coeffs, want ? &di : nullptr,
                                                want ? &dn : nullptr);
  Matrix dc;
  Vector err = obstacle_error(c, body, sdf, params, want ? &dc : nullptr);
  if (d_state_i) *d_state_i = dc * di;
  if (d_state_next) *d_state_next = dc * dn;
  return err;
}

double min_clearance(const MobileConfig& config, const BodyModel& body,
                     const SignedDistanceField& sdf) {
  const SphereKinematics fk = forward_kinematics(config, body, false);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fk.centers.size(); ++k) {
    best = std::min(best, sdf.distance(fk.centers[k]) - body.spheres[k].radius);
  }
  return best;
}

bool collision_free(std::span<const MobileConfig> configs, const BodyModel& body,
                    const SignedDistanceField& sdf) {
  for (const MobileConfig& c : configs) {
    if (!(min_clearance(c, body, sdf) > 0.0)) return false;
  }
  return true;
}

std::vector<MobileConfig> upsample_segment(const MarkovState& state_i,
                                           const MarkovState& state_next, double dt,
                                           const Matrix& qc, int resolution) {
  if (resolution < 1) throw std::invalid_argument("collision-check resolution must be >= 1");
  std::vector<MobileConfig> out;
  out.reserve(resolution + 1);
  out.push_back(state_i.config);
  for (int k = 1; k < resolution; ++k) {
    const double tau = dt * k / resolution;
    out.push_back(gp::interpolate_state(state_i, state_next, dt, tau, qc).config);
  }
  out.push_back(state_next.config);
  return out;
}

bool collision_free(const MarkovState& state_i, const MarkovState& state_next, double dt,
                    const Matrix& qc, int resolution, const BodyModel& body,
                    const SignedDistanceField& sdf) {
  const auto configs = upsample_segment(state_i, state_next, dt, qc, resolution);
  return collision_free(configs, body, sdf);
}

}  // namespace steap::env
