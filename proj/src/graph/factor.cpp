#include "steap/graph/factor.hpp"

#include <cmath>

namespace steap {

const char* to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::GpPrior: return "GpPrior";
    case FactorKind::Obstacle: return "Obstacle";
    case FactorKind::ObstacleInterp: return "ObstacleInterp";
    case FactorKind::StartFix: return "StartFix";
    case FactorKind::GoalFix: return "GoalFix";
    case FactorKind::Measurement: return "Measurement";
  }
  return "?";
}

std::vector<const MarkovState*> Factor::gather(const Values& values) const {
  std::vector<const MarkovState*> states;
  states.reserve(keys_.size());
  for (Key k : keys_) {
    auto it = values.find(k);
    if (it == values.end()) throw MissingVariable(k);
    states.push_back(&it->second);
  }
  return states;
}

FactorEvaluation Factor::evaluate(const Values& values, bool with_jacobians) const {
  FactorEvaluation ev;
  const auto states = gather(values);
  ev.residual = noise_.whiten(unwhitened_error(states, with_jacobians ? &ev.jacobians : nullptr));
  for (Matrix& j : ev.jacobians) j = noise_.whiten(j);
  return ev;
}

double Factor::error(const Values& values) const {
  return 0.5 * evaluate(values, false).residual.squaredNorm();
}

GpPriorFactor::GpPriorFactor(Key first, Key second, double dt, const Matrix& qc)
    : Factor(FactorKind::GpPrior, {first, second},
             NoiseModel::from_covariance(gp::process_noise_cov(dt, qc))),
      dt_(dt) {}

Vector GpPriorFactor::unwhitened_error(const std::vector<const MarkovState*>& states,
                                       std::vector<Matrix>* jacobians) const {
  if (!jacobians) return gp::gp_error_lie(*states[0], *states[1], dt_);
  jacobians->resize(2);
  return gp::gp_error_lie(*states[0], *states[1], dt_, &(*jacobians)[0], &(*jacobians)[1]);
}

FixFactor::FixFactor(FactorKind kind, Key key, MarkovState target, const Matrix& covariance)
    : Factor(kind, {key}, NoiseModel::from_covariance(covariance)), target_(std::move(target)) {
  if (covariance.rows() != target_.tangent_dim()) {
    throw DimensionError("fix factor covariance must match the state tangent dimension");
  }
}

Vector FixFactor::unwhitened_error(const std::vector<const MarkovState*>& states,
                                   std::vector<Matrix>* jacobians) const {
  const MarkovState& s = *states[0];
  const int d = s.dof();
  Vector r(2 * d);
  r.head(d) = local_coordinates(target_.config, s.config);
  r.tail(d) = s.velocity - target_.velocity;
  if (jacobians) {
    Matrix dc;
    local_coordinates_jacobians(target_.config, s.config, nullptr, &dc);
    Matrix j = Matrix::Zero(2 * d, 2 * d);
    j.topLeftCorner(d, d) = dc;
    j.bottomRightCorner(d, d).setIdentity();
    jacobians->assign(1, std::move(j));
  }
  return r;
}

MeasurementFactor::MeasurementFactor(Key key, MobileConfig mean, const Matrix& covariance)
    : Factor(FactorKind::Measurement, {key}, NoiseModel::from_covariance(covariance)),
      mean_(std::move(mean)) {
  if (covariance.rows() != mean_.tangent_dim()) {
    throw DimensionError("measurement covariance must match the config tangent dimension");
  }
}

Vector MeasurementFactor::unwhitened_error(const std::vector<const MarkovState*>& states,
                                           std::vector<Matrix>* jacobians) const {
  const MarkovState& s = *states[0];
  const int d = s.dof();
  if (jacobians) {
    Matrix dc;
    local_coordinates_jacobians(mean_, s.config, nullptr, &dc);
    Matrix j = Matrix::Zero(d, 2 * d);
    j.leftCols(d) = dc;
    jacobians->assign(1, std::move(j));
  }
  return local_coordinates(mean_, s.config);
}

ObstacleFactor::ObstacleFactor(Key key, std::shared_ptr<const ObstacleModel> model)
    : Factor(FactorKind::Obstacle, {key},
             NoiseModel::isotropic(static_cast<int>(model->body->spheres.size()),
                                   model->hinge.sigma_obs)),
      model_(std::move(model)) {}

Vector ObstacleFactor::unwhitened_error(const std::vector<const MarkovState*>& states,
                                        std::vector<Matrix>* jacobians) const {
  const MarkovState& s = *states[0];
  if (!jacobians) return env::obstacle_error(s.config, *model_->body, *model_->sdf, model_->hinge);
  Matrix dc;
  Vector e = env::obstacle_error(s.config, *model_->body, *model_->sdf, model_->hinge, &dc);
  Matrix j = Matrix::Zero(e.size(), s.tangent_dim());
  j.leftCols(s.dof()) = dc;
  jacobians->assign(1, std::move(j));
  return e;
}

InterpObstacleFactor::InterpObstacleFactor(Key first, Key second, double dt, double tau,
                                           const Matrix& qc,
                                           std::shared_ptr<const ObstacleModel> model)
    : Factor(FactorKind::ObstacleInterp, {first, second},
             NoiseModel::isotropic(static_cast<int>(model->body->spheres.size()),
                                   model->hinge.sigma_obs)),
      tau_(tau), coeffs_(gp::gp_interp_coeffs(dt, tau, qc)), model_(std::move(model)) {
  if (!(tau > 0.0 && tau < dt)) {
    throw std::out_of_range("interpolated obstacle factor needs 0 < tau < dt");
  }
}

Vector InterpObstacleFactor::unwhitened_error(const std::vector<const MarkovState*>& states,
                                              std::vector<Matrix>* jacobians) const {
  if (!jacobians) {
    return env::interp_obstacle_error(*states[0], *states[1], coeffs_, *model_->body,
                                      *model_->sdf, model_->hinge);
  }
  jacobians->resize(2);
  return env::interp_obstacle_error(*states[0], *states[1], coeffs_, *model_->body, *model_->sdf,
                                    model_->hinge, &(*jacobians)[0], &(*jacobians)[1]);
}

}  // namespace steap
