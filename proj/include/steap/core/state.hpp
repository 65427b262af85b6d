#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "steap/core/se2.hpp"

namespace steap {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration on SE(2) x R^n: a planar base plus n arm joint angles.
///
/// A config built with `euclidean()` has no base and lives in R^n; it is
/// used for the pure vector-space prior. Arm joints are plain reals and are
/// never wrapped.
struct MobileConfig {
  Se2Pose base;
  Vector arm;
  bool has_base = true;

  MobileConfig() = default;
  MobileConfig(const Se2Pose& base_pose, Vector joints) : base(base_pose), arm(std::move(joints)) {}

  static MobileConfig euclidean(Vector values) {
    MobileConfig c;
    c.arm = std::move(values);
    c.has_base = false;
    return c;
  }

  int arm_dim() const { return static_cast<int>(arm.size()); }
  int tangent_dim() const { return (has_base ? 3 : 0) + arm_dim(); }
  bool compatible(const MobileConfig& other) const {
    return has_base == other.has_base && arm_dim() == other.arm_dim();
  }
};

/// tangent ordering: (vx, vy, omega, joint_1..joint_n).
Vector local_coordinates(const MobileConfig& a, const MobileConfig& b);
MobileConfig retract(const MobileConfig& a, const Vector& delta);

/// d local_coordinates(a, b) / d(right perturbation of a) and of b.
void local_coordinates_jacobians(const MobileConfig& a, const MobileConfig& b, Matrix* d_a,
                                 Matrix* d_b);

/// Block-diagonal right Jacobian of retract (identity on the arm block).
Matrix config_right_jacobian(const MobileConfig& like, const Vector& delta);
/// Adjoint of the config increment exp(delta), identity on the arm block.
Matrix config_adjoint_inverse(const MobileConfig& like, const Vector& delta);

/// Markov state: configuration plus body-frame velocity (m/s, rad/s).
struct MarkovState {
  MobileConfig config;
  Vector velocity;

  MarkovState() = default;
  MarkovState(MobileConfig c, Vector v);
  static MarkovState at_rest(const MobileConfig& c);

  int dof() const { return config.tangent_dim(); }
  int tangent_dim() const { return 2 * dof(); }
};

/// Full state increment: config tangent followed by velocity increment.
MarkovState retract(const MarkovState& s, const Vector& delta);
Vector local_coordinates(const MarkovState& a, const MarkovState& b);

struct Trajectory {
  std::vector<double> times;
  std::vector<MarkovState> states;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  /// Throws std::invalid_argument if times are not strictly increasing or counts differ.
  void validate() const;
};

}  // namespace steap
