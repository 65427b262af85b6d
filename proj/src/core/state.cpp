#include "steap/core/state.hpp"

namespace steap {

namespace {

void require_compatible(const MobileConfig& a, const MobileConfig& b) {
  if (!a.compatible(b)) {
    throw DimensionError("incompatible configurations: arm dims " + std::to_string(a.arm_dim()) +
                         " vs " + std::to_string(b.arm_dim()));
  }
}

}  // namespace

Vector local_coordinates(const MobileConfig& a, const MobileConfig& b) {
  require_compatible(a, b);
  Vector out(a.tangent_dim());
  if (a.has_base) out.head<3>() = a.base.between(b.base).log();
  out.tail(a.arm_dim()) = b.arm - a.arm;
  return out;
}

MobileConfig retract(const MobileConfig& a, const Vector& delta) {
  if (delta.size() != a.tangent_dim()) {
    throw DimensionError("retract: delta has " + std::to_string(delta.size()) +
                         " entries, expected " + std::to_string(a.tangent_dim()));
  }
  MobileConfig out = a;
  if (a.has_base) out.base = a.base.compose(Se2Pose::exp(delta.head<3>()));
  out.arm = a.arm + delta.tail(a.arm_dim());
  return out;
}

void local_coordinates_jacobians(const MobileConfig& a, const MobileConfig& b, Matrix* d_a,
                                 Matrix* d_b) {
  require_compatible(a, b);
  const int d = a.tangent_dim();
  const int n = a.arm_dim();
  if (d_a) {
    d_a->setZero(d, d);
    d_a->bottomRightCorner(n, n) = -Matrix::Identity(n, n);
  }
  if (d_b) {
    d_b->setZero(d, d);
    d_b->bottomRightCorner(n, n) = Matrix::Identity(n, n);
  }
  if (!a.has_base) return;
  const Se2Pose rel = a.base.between(b.base);
  const Vector3 xi = rel.log();
  const Matrix3 jr_inv = se2_right_jacobian_inverse(xi);
  if (d_b) d_b->topLeftCorner<3, 3>() = jr_inv;
  // exp(-da) X = X exp(-Ad_{X^-1} da)
  if (d_a) d_a->topLeftCorner<3, 3>() = -jr_inv * rel.inverse().adjoint();
}

Matrix config_right_jacobian(const MobileConfig& like, const Vector& delta) {
  const int d = like.tangent_dim();
  Matrix j = Matrix::Identity(d, d);
  if (like.has_base) j.topLeftCorner<3, 3>() = se2_right_jacobian(delta.head<3>());
  return j;
}

Matrix config_adjoint_inverse(const MobileConfig& like, const Vector& delta) {
  const int d = like.tangent_dim();
  Matrix j = Matrix::Identity(d, d);
  if (like.has_base) j.topLeftCorner<3, 3>() = Se2Pose::exp(delta.head<3>()).inverse().adjoint();
  return j;
}

MarkovState::MarkovState(MobileConfig c, Vector v) : config(std::move(c)), velocity(std::move(v)) {
  if (velocity.size() != config.tangent_dim()) {
    throw DimensionError("velocity length " + std::to_string(velocity.size()) +
                         " does not match tangent dimension " +
                         std::to_string(config.tangent_dim()));
  }
}

MarkovState MarkovState::at_rest(const MobileConfig& c) {
  return {c, Vector::Zero(c.tangent_dim())};
}

MarkovState retract(const MarkovState& s, const Vector& delta) {
  const int d = s.dof();
  if (delta.size() != 2 * d) {
    throw DimensionError("state retract: delta has " + std::to_string(delta.size()) +
                         " entries, expected " + std::to_string(2 * d));
  }
  return {retract(s.config, delta.head(d)), s.velocity + delta.tail(d)};
}

Vector local_coordinates(const MarkovState& a, const MarkovState& b) {
  const int d = a.dof();
  Vector out(2 * d);
  out.head(d) = local_coordinates(a.config, b.config);
  out.tail(d) = b.velocity - a.velocity;
  return out;
}

void Trajectory::validate() const {
  if (times.size() != states.size()) {
    throw std::invalid_argument("trajectory has " + std::to_string(times.size()) + " times but " +
                                std::to_string(states.size()) + " states");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("trajectory times must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
  }
}

}  // namespace steap
