#include "steap/env/body.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace steap::env {

BodyModel BodyModel::planar_mobile_arm() {
  BodyModel b;
  const double bx = 0.25, by = 0.175, base_r = 0.35, link_r = 0.08;
  for (double sx : {-bx, bx}) {
    for (double sy : {-by, by}) b.spheres.push_back({0, {sx, sy}, base_r});
  }
  for (int link = 1; link <= 2; ++link) {
    const double len = b.link_lengths[link - 1];
    for (int k = 1; k <= 3; ++k) b.spheres.push_back({link, {len * k / 3.0, 0.0}, link_r});
  }
  return b;
}

double BodyModel::max_reach() const {
  double reach = 0.0;
  for (const BodySphere& s : spheres) {
    double r = s.radius;
    if (s.link == 0) {
      r += s.offset.norm();
    } else {
      double before = 0.0;
      for (int k = 0; k < s.link - 1; ++k) before += link_lengths[k];
      r += before + s.offset.norm();
    }
    reach = std::max(reach, r);
  }
  return reach;
}

void BodyModel::validate() const {
  if (spheres.empty()) throw std::invalid_argument("body model has no spheres");
  for (const BodySphere& s : spheres) {
    if (!(s.radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
    if (s.link < 0 || s.link > arm_dof()) {
      throw std::invalid_argument("sphere attached to unknown link " + std::to_string(s.link));
    }
  }
}

SphereKinematics forward_kinematics(const MobileConfig& config, const BodyModel& body,
                                    bool with_jacobians) {
  if (!config.has_base || config.arm_dim() != body.arm_dof()) {
    throw DimensionError("forward_kinematics: config has " + std::to_string(config.arm_dim()) +
                         " joints, body expects " + std::to_string(body.arm_dof()));
  }
  const int n = body.arm_dof();
  const int d = 3 + n;
  const double yaw = config.base.yaw();
  const Eigen::Vector2d p = config.base.translation();
  const Eigen::Matrix2d rot = config.base.rotation();

  // Link k frame: origin o_k, absolute heading h_k. Link 1 starts at the base origin.
  std::vector<Eigen::Vector2d> origins(n + 1);
  std::vector<double> headings(n + 1);
  origins[0] = p;
  headings[0] = yaw;
  Eigen::Vector2d joint = p;
  double heading = yaw;
  for (int k = 1; k <= n; ++k) {
    heading += config.arm(k - 1);
    origins[k] = joint;
    headings[k] = heading;
    joint += body.link_lengths[k - 1] * Eigen::Vector2d(std::cos(heading), std::sin(heading));
  }

  SphereKinematics out;
  out.centers.reserve(body.spheres.size());
  if (with_jacobians) out.jacobians.reserve(body.spheres.size());
  const auto perp = [](const Eigen::Vector2d& v) { return Eigen::Vector2d(-v.y(), v.x()); };

  for (const BodySphere& s : body.spheres) {
    const double h = headings[s.link];
    const Eigen::Vector2d dir(std::cos(h), std::sin(h));
    const Eigen::Vector2d c = origins[s.link] + dir * s.offset.x() + perp(dir) * s.offset.y();
    out.centers.push_back(c);
    if (!with_jacobians) continue;
    Matrix j = Matrix::Zero(2, d);
    j.leftCols<2>() = rot;
    // Rotating the base (or joint k) about its axis moves the point by perp(c - pivot).
    j.col(2) = perp(c - p);
    for (int k = 1; k <= s.link; ++k) j.col(2 + k) = perp(c - origins[k]);
    out.jacobians.push_back(std::move(j));
  }
  return out;
}

}  // namespace steap::env
