#pragma once

#include <vector>

#include <Eigen/Core>

#include "steap/core/state.hpp"

namespace steap::env {

/// A collision sphere attached to the base (link 0) or to arm link k >= 1.
struct BodySphere {
  int link = 0;
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();  ///< in the link frame; arm links extend along +x
  double radius = 0.1;
};

/// Planar mobile base carrying a serial revolute arm mounted at the base origin.
struct BodyModel {
  std::vector<BodySphere> spheres;
  Eigen::Vector2d base_size{1.0, 0.7};
  std::vector<double> link_lengths{0.6, 0.6};

  int arm_dof() const { return static_cast<int>(link_lengths.size()); }
  /// Largest distance from the base origin to any sphere surface, over all joint angles.
  double max_reach() const;
  void validate() const;

  /// 1m x 0.7m base (four r=0.35 spheres) with two 0.6m links (three r=0.08 spheres each, the
  /// last at the link tip).
  static BodyModel planar_mobile_arm();
};

struct SphereKinematics {
  std::vector<Eigen::Vector2d> centers;
  std::vector<Matrix> jacobians;  ///< 2 x (3 + n) each, w.r.t. the config tangent
};

SphereKinematics forward_kinematics(const MobileConfig& config, const BodyModel& body,
                                    bool with_jacobians = true);

}  // namespace steap::env
