#include "steap/gp/gp_prior.hpp"

#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace steap::gp {

GpParams GpParams::diagonal(int base_dim, int arm_dim, double base_psd, double arm_psd) {
  GpParams p;
  p.qc = Matrix::Zero(base_dim + arm_dim, base_dim + arm_dim);
  p.qc.diagonal().head(base_dim).setConstant(base_psd);
  p.qc.diagonal().tail(arm_dim).setConstant(arm_psd);
  return p;
}

void GpParams::validate() const {
  if (qc.rows() == 0 || qc.rows() != qc.cols()) {
    throw std::invalid_argument("Q_C must be a non-empty square matrix");
  }
  if (!qc.isApprox(qc.transpose(), 1e-12)) throw std::invalid_argument("Q_C must be symmetric");
  Eigen::LLT<Matrix> llt(qc);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("Q_C must be positive definite");
}

Matrix transition_matrix(double dt, int dim) {
  Matrix phi = Matrix::Identity(2 * dim, 2 * dim);
  phi.topRightCorner(dim, dim).diagonal().setConstant(dt);
  return phi;
}

namespace {

// Q(dt) without the dt > 0 check; Q(0) = 0.
Matrix accumulated_noise(double dt, const Matrix& qc) {
  const auto d = qc.rows();
  Matrix q(2 * d, 2 * d);
  q.topLeftCorner(d, d) = (dt * dt * dt / 3.0) * qc;
  q.topRightCorner(d, d) = (dt * dt / 2.0) * qc;
  q.bottomLeftCorner(d, d) = (dt * dt / 2.0) * qc;
  q.bottomRightCorner(d, d) = dt * qc;
  return q;
}

void require_positive(double dt) {
  if (!(dt > 0.0)) {
    throw DegenerateInterval("GP interval must be positive, got dt=" + std::to_string(dt));
  }
}

}  // namespace

Matrix process_noise_cov(double dt, const Matrix& qc) {
  require_positive(dt);
  return accumulated_noise(dt, qc);
}

Vector gp_error_vector(const Vector& theta_i, const Vector& theta_next, double dt) {
  if (theta_i.size() != theta_next.size() || theta_i.size() % 2 != 0) {
    throw DimensionError("gp_error_vector: state sizes " + std::to_string(theta_i.size()) +
                         " and " + std::to_string(theta_next.size()));
  }
  const int dim = static_cast<int>(theta_i.size() / 2);
  return transition_matrix(dt, dim) * theta_i - theta_next;
}

Vector gp_error_vector(const MarkovState& state_i, const MarkovState& state_next, double dt) {
  if (state_i.config.has_base || state_next.config.has_base) {
    throw DimensionError("gp_error_vector expects vector-space states; use gp_error_lie");
  }
  Vector a(state_i.tangent_dim()), b(state_next.tangent_dim());
  a << state_i.config.arm, state_i.velocity;
  b << state_next.config.arm, state_next.velocity;
  return gp_error_vector(a, b, dt);
}

Vector gp_error_lie(const MarkovState& state_i, const MarkovState& state_next, double dt,
                    Matrix* d_state_i, Matrix* d_state_next) {
  require_positive(dt);
  if (!state_i.config.compatible(state_next.config)) {
    throw DimensionError("gp_error_lie: incompatible states");
  }
  const int d = state_i.dof();
  Matrix d_xi_a, d_xi_b;
  const bool want = d_state_i || d_state_next;
  const Vector xi = local_coordinates(state_i.config, state_next.config);
  if (want) local_coordinates_jacobians(state_i.config, state_next.config, &d_xi_a, &d_xi_b);

  Vector r(2 * d);
  r.head(d) = state_i.velocity * dt - xi;
  r.tail(d) = state_i.velocity - state_next.velocity;

  const Matrix eye = Matrix::Identity(d, d);
  if (d_state_i) {
    d_state_i->setZero(2 * d, 2 * d);
    d_state_i->topLeftCorner(d, d) = -d_xi_a;
    d_state_i->topRightCorner(d, d) = dt * eye;
    d_state_i->bottomRightCorner(d, d) = eye;
  }
  if (d_state_next) {
    d_state_next->setZero(2 * d, 2 * d);
    d_state_next->topLeftCorner(d, d) = -d_xi_b;
    d_state_next->bottomRightCorner(d, d) = -eye;
  }
  return r;
}

GpInterpCoeffs gp_interp_coeffs(double dt, double tau, const Matrix& qc) {
  require_positive(dt);
  if (tau < 0.0 || tau > dt) {
    throw std::out_of_range("interpolation time " + std::to_string(tau) + " outside [0, " +
                            std::to_string(dt) + "]");
  }
  const int d = static_cast<int>(qc.rows());
  GpInterpCoeffs c;
  const Matrix q_tau = accumulated_noise(tau, qc);
  const Matrix q_inv = process_noise_cov(dt, qc).inverse();
  c.psi = q_tau * transition_matrix(dt - tau, d).transpose() * q_inv;
  c.lambda = transition_matrix(tau, d) - c.psi * transition_matrix(dt, d);
  return c;
}

namespace {

struct LocalStates {
  Vector gamma_i;
  Vector gamma_next;
};

LocalStates local_states(const MarkovState& state_i, const MarkovState& state_next) {
  const int d = state_i.dof();
  LocalStates ls;
  ls.gamma_i.setZero(2 * d);
  ls.gamma_i.tail(d) = state_i.velocity;
  ls.gamma_next.resize(2 * d);
  ls.gamma_next.head(d) = local_coordinates(state_i.config, state_next.config);
  ls.gamma_next.tail(d) = state_next.velocity;
  return ls;
}

}  // namespace

MarkovState interpolate_state(const MarkovState& state_i, const MarkovState& state_next,
                              const GpInterpCoeffs& coeffs) {
  const int d = state_i.dof();
  if (coeffs.lambda.rows() != 2 * d) throw DimensionError("interpolation coefficient size mismatch");
  const LocalStates ls = local_states(state_i, state_next);
  const Vector gamma = coeffs.lambda * ls.gamma_i + coeffs.psi * ls.gamma_next;
  return {retract(state_i.config, gamma.head(d)), gamma.tail(d)};
}

MarkovState interpolate_state(const MarkovState& state_i, const MarkovState& state_next, double dt,
                              double tau, const Matrix& qc) {
  return interpolate_state(state_i, state_next, gp_interp_coeffs(dt, tau, qc));
}

MobileConfig interpolate_config(const MarkovState& state_i, const MarkovState& state_next,
                                const GpInterpCoeffs& coeffs, Matrix* d_state_i,
                                Matrix* d_state_next) {
  const int d = state_i.dof();
  if (coeffs.lambda.rows() != 2 * d) throw DimensionError("interpolation coefficient size mismatch");
  const LocalStates ls = local_states(state_i, state_next);
  const Vector xi_tau = coeffs.lambda.topRows(d) * ls.gamma_i + coeffs.psi.topRows(d) * ls.gamma_next;
  const MobileConfig out = retract(state_i.config, xi_tau);
  if (!d_state_i && !d_state_next) return out;

  Matrix d_xi_a, d_xi_b;
  local_coordinates_jacobians(state_i.config, state_next.config, &d_xi_a, &d_xi_b);
  const Matrix psi_pos = coeffs.psi.topLeftCorner(d, d);
  const Matrix psi_vel = coeffs.psi.topRightCorner(d, d);
  const Matrix lambda_vel = coeffs.lambda.topRightCorner(d, d);
  const Matrix jr = config_right_jacobian(state_i.config, xi_tau);

  if (d_state_i) {
    d_state_i->setZero(d, 2 * d);
    d_state_i->leftCols(d) = config_adjoint_inverse(state_i.config, xi_tau) + jr * psi_pos * d_xi_a;
    d_state_i->rightCols(d) = jr * lambda_vel;
  }
  if (d_state_next) {
    d_state_next->setZero(d, 2 * d);
    d_state_next->leftCols(d) = jr * psi_pos * d_xi_b;
    d_state_next->rightCols(d) = jr * psi_vel;
  }
  return out;
}

}  // namespace steap::gp
