#pragma once

#include <span>

#include "steap/core/state.hpp"
#include "steap/env/body.hpp"
#include "steap/env/sdf.hpp"
#include "steap/gp/gp_prior.hpp"

namespace steap::env {

struct HingeLossParams {
  double eps = 0.2;         ///< safety margin (m)
  double sigma_obs = 0.05;  ///< isotropic obstacle cost standard deviation

  void validate() const;
};

/// max(eps - d, 0).
inline double hinge_loss(double d, double eps) { return d < eps ? eps - d : 0.0; }

/// One hinge cost per sphere against the radius-inflated clearance sdf(center) - radius.
/// The Jacobian is taken w.r.t. the config tangent; rows of inactive spheres are zero.
Vector obstacle_error(const MobileConfig& config, const BodyModel& body,
                      const SignedDistanceField& sdf, const HingeLossParams& params,
                      Matrix* d_config = nullptr);

/// obstacle_error at the GP-interpolated configuration between two support states.
Vector interp_obstacle_error(const MarkovState& state_i, const MarkovState& state_next,
                             const gp::GpInterpCoeffs& coeffs, const BodyModel& body,
                             const SignedDistanceField& sdf, const HingeLossParams& params,
                             Matrix* d_state_i = nullptr, Matrix* d_state_next = nullptr);

/// Smallest sdf(center) - radius over all spheres.
double min_clearance(const MobileConfig& config, const BodyModel& body,
                     const SignedDistanceField& sdf);

/// True iff every sphere of every config strictly clears the obstacles.
bool collision_free(std::span<const MobileConfig> configs, const BodyModel& body,
                    const SignedDistanceField& sdf);

/// Upsamples the segment at tau = k dt / resolution for k = 0..resolution.
std::vector<MobileConfig> upsample_segment(const MarkovState& state_i,
                                           const MarkovState& state_next, double dt,
                                           const Matrix& qc, int resolution);

bool collision_free(const MarkovState& state_i, const MarkovState& state_next, double dt,
                    const Matrix& qc, int resolution, const BodyModel& body,
                    const SignedDistanceField& sdf);

}  // namespace steap::env
