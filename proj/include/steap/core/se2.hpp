#pragma once

#include <Eigen/Core>

namespace steap {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

/// Rigid planar transform. Tangent vectors are ordered (vx, vy, omega).
class Se2Pose {
 public:
  Se2Pose() = default;
  Se2Pose(double x, double y, double yaw);

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  Eigen::Vector2d translation() const { return {x_, y_}; }
  Eigen::Matrix2d rotation() const;

  static Se2Pose identity() { return {}; }
  static Se2Pose exp(const Vector3& xi);
  Vector3 log() const;

  Se2Pose compose(const Se2Pose& other) const;
  Se2Pose inverse() const;
  Se2Pose between(const Se2Pose& other) const { return inverse().compose(other); }
  Eigen::Vector2d transform_from(const Eigen::Vector2d& p) const;

  /// Adjoint map acting on (vx, vy, omega).
  Matrix3 adjoint() const;

  Se2Pose operator*(const Se2Pose& other) const { return compose(other); }

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

/// Below this |omega| exp/log use their small-angle branch.
inline constexpr double kSmallAngle = 1e-9;

/// Right Jacobian of exp: exp(xi + d) ~= exp(xi) exp(Jr(xi) d).
Matrix3 se2_right_jacobian(const Vector3& xi);
Matrix3 se2_right_jacobian_inverse(const Vector3& xi);

}  // namespace steap
