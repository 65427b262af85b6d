#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "steap/core/state.hpp"
#include "steap/env/body.hpp"
#include "steap/env/obstacle.hpp"
#include "steap/env/sdf.hpp"
#include "steap/gp/gp_prior.hpp"
#include "steap/graph/noise_model.hpp"

namespace steap {

using Key = std::size_t;
using Values = std::map<Key, MarkovState>;

enum class FactorKind { GpPrior, Obstacle, ObstacleInterp, StartFix, GoalFix, Measurement };

const char* to_string(FactorKind kind);

class MissingVariable : public std::out_of_range {
 public:
  explicit MissingVariable(Key key)
      : std::out_of_range("no value for variable " + std::to_string(key)), key_(key) {}
  Key key() const { return key_; }

 private:
  Key key_;
};

/// Whitened residual and one Jacobian block per connected variable.
struct FactorEvaluation {
  Vector residual;
  std::vector<Matrix> jacobians;
};

/// A Gaussian likelihood or prior term over one or two Markov states.
class Factor {
 public:
  Factor(FactorKind kind, std::vector<Key> keys, NoiseModel noise)
      : kind_(kind), keys_(std::move(keys)), noise_(std::move(noise)) {}
  virtual ~Factor() = default;

  FactorKind kind() const { return kind_; }
  const std::vector<Key>& keys() const { return keys_; }
  const NoiseModel& noise() const { return noise_; }
  int dim() const { return noise_.dim(); }

  /// Unwhitened residual; fills one Jacobian per key (w.r.t. the full state tangent) when asked.
  virtual Vector unwhitened_error(const std::vector<const MarkovState*>& states,
                                  std::vector<Matrix>* jacobians) const = 0;

  FactorEvaluation evaluate(const Values& values, bool with_jacobians = true) const;
  /// 0.5 |whitened residual|^2
  double error(const Values& values) const;

 private:
  std::vector<const MarkovState*> gather(const Values& values) const;

  FactorKind kind_;
  std::vector<Key> keys_;
  NoiseModel noise_;
};

using FactorPtr = std::shared_ptr<const Factor>;

/// Constant-velocity prior between consecutive support states.
class GpPriorFactor final : public Factor {
 public:
  GpPriorFactor(Key first, Key second, double dt, const Matrix& qc);
  double dt() const { return dt_; }
  Vector unwhitened_error(const std::vector<const MarkovState*>& states,
                          std::vector<Matrix>* jacobians) const override;

 private:
  double dt_;
};

/// Anchors a state to a target configuration and velocity (start, goal, or a replanning anchor).
class FixFactor final : public Factor {
 public:
  FixFactor(FactorKind kind, Key key, MarkovState target, const Matrix& covariance);
  const MarkovState& target() const { return target_; }
  Vector unwhitened_error(const std::vector<const MarkovState*>& states,
                          std::vector<Matrix>* jacobians) const override;

 private:
  MarkovState target_;
};

/// Gaussian pose measurement of the configuration only.
class MeasurementFactor final : public Factor {
 public:
  MeasurementFactor(Key key, MobileConfig mean, const Matrix& covariance);
  const MobileConfig& mean() const { return mean_; }
  Vector unwhitened_error(const std::vector<const MarkovState*>& states,
                          std::vector<Matrix>* jacobians) const override;

 private:
  MobileConfig mean_;
};

/// Shared, immutable collision model used by obstacle factors.
struct ObstacleModel {
  std::shared_ptr<const env::SignedDistanceField> sdf;
  std::shared_ptr<const env::BodyModel> body;
  env::HingeLossParams hinge;
};

class ObstacleFactor final : public Factor {
 public:
  ObstacleFactor(Key key, std::shared_ptr<const ObstacleModel> model);
  Vector unwhitened_error(const std::vector<const MarkovState*>& states,
                          std::vector<Matrix>* jacobians) const override;

 private:
  std::shared_ptr<const ObstacleModel> model_;
};

/// Obstacle cost at an interpolated time tau in (0, dt) between two support states.
class InterpObstacleFactor final : public Factor {
 public:
  InterpObstacleFactor(Key first, Key second, double dt, double tau, const Matrix& qc,
                       std::shared_ptr<const ObstacleModel> model);
  double tau() const { return tau_; }
  Vector unwhitened_error(const std::vector<const MarkovState*>& states,
                          std::vector<Matrix>* jacobians) const override;

 private:
  double tau_;
  gp::GpInterpCoeffs coeffs_;
  std::shared_ptr<const ObstacleModel> model_;
};

}  // namespace steap
