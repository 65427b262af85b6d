#include "steap/core/se2.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/LU>

namespace steap {

double wrap_angle(double angle) {
  constexpr double kPi = std::numbers::pi;
  if (angle > -kPi && angle <= kPi) return angle;
  double wrapped = std::remainder(angle, 2.0 * kPi);
  if (wrapped <= -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

Se2Pose::Se2Pose(double x, double y, double yaw) : x_(x), y_(y), yaw_(wrap_angle(yaw)) {}

Eigen::Matrix2d Se2Pose::rotation() const {
  const double c = std::cos(yaw_), s = std::sin(yaw_);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Se2Pose Se2Pose::exp(const Vector3& xi) {
  const double w = xi(2);
  if (std::abs(w) < kSmallAngle) {
    return {xi(0), xi(1), w};
  }
  const double sh = std::sin(0.5 * w);
  const double a = std::sin(w) / w, b = 2.0 * sh * sh / w;
  return {a * xi(0) - b * xi(1), b * xi(0) + a * xi(1), w};
}

Vector3 Se2Pose::log() const {
  const double w = yaw_;
  if (std::abs(w) < kSmallAngle) {
    return {x_, y_, w};
  }
  // V^{-1} = (w/2) [[cot(w/2), 1], [-1, cot(w/2)]]
  const double half = 0.5 * w;
  const double k = half * std::cos(half) / std::sin(half);
  return {k * x_ + half * y_, -half * x_ + k * y_, w};
}

Se2Pose Se2Pose::compose(const Se2Pose& other) const {
  const double c = std::cos(yaw_), s = std::sin(yaw_);
  return {x_ + c * other.x_ - s * other.y_, y_ + s * other.x_ + c * other.y_, yaw_ + other.yaw_};
}

Se2Pose Se2Pose::inverse() const {
  const double c = std::cos(yaw_), s = std::sin(yaw_);
  return {-c * x_ - s * y_, s * x_ - c * y_, -yaw_};
}

Eigen::Vector2d Se2Pose::transform_from(const Eigen::Vector2d& p) const {
  return rotation() * p + translation();
}

Matrix3 Se2Pose::adjoint() const {
  Matrix3 ad = Matrix3::Identity();
  ad.topLeftCorner<2, 2>() = rotation();
  ad(0, 2) = y_;
  ad(1, 2) = -x_;
  return ad;
}

Matrix3 se2_right_jacobian(const Vector3& xi) {
  const double vx = xi(0), vy = xi(1), w = xi(2);
  Matrix3 jr = Matrix3::Identity();
  if (std::abs(w) < 1e-5) {
    // second-order Taylor expansion
    const double w2 = w * w;
    jr(0, 0) = 1.0 - w2 / 6.0;
    jr(0, 1) = w / 2.0 - w * w2 / 24.0;
    jr(1, 0) = -jr(0, 1);
    jr(1, 1) = jr(0, 0);
    jr(0, 2) = vx * (w / 6.0) - vy * (0.5 - w2 / 24.0);
    jr(1, 2) = vx * (0.5 - w2 / 24.0) + vy * (w / 6.0);
    return jr;
  }
  const double s = std::sin(w), c = std::cos(w), w2 = w * w;
  const double sh = std::sin(0.5 * w);
  jr(0, 0) = s / w;
  jr(0, 1) = 2.0 * sh * sh / w;
  jr(1, 0) = -jr(0, 1);
  jr(1, 1) = s / w;
  jr(0, 2) = (w * vx - vy + vy * c - vx * s) / w2;
  jr(1, 2) = (vx + w * vy - vx * c - vy * s) / w2;
  return jr;
}

Matrix3 se2_right_jacobian_inverse(const Vector3& xi) { return se2_right_jacobian(xi).inverse(); }

}  // namespace steap
