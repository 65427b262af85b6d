#pragma once

#include <stdexcept>

#include "steap/core/state.hpp"

namespace steap::gp {

class DegenerateInterval : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Constant-velocity prior hyperparameters.
struct GpParams {
  Matrix qc;  ///< power-spectral density of the acceleration noise, dof x dof, SPD
  double dt_default = 1.0;

  /// Diagonal Q_C with one value for the base block and one for the arm.
  static GpParams diagonal(int base_dim, int arm_dim, double base_psd, double arm_psd);
  /// Throws std::invalid_argument when qc is not symmetric positive definite.
  void validate() const;
};

/// Phi(t, s) for the double integrator, 2dim x 2dim.
Matrix transition_matrix(double dt, int dim);

/// Q_{i,i+1}: covariance accumulated over an interval of length dt.
Matrix process_noise_cov(double dt, const Matrix& qc);

/// Phi(dt) theta_i - theta_{i+1} for stacked [position; velocity] vectors.
Vector gp_error_vector(const Vector& theta_i, const Vector& theta_next, double dt);
Vector gp_error_vector(const MarkovState& state_i, const MarkovState& state_next, double dt);

/// Residual of the locally linearized Lie-group prior,
/// [w_i dt - xi ; w_i - w_{i+1}] with xi = local_coordinates(config_i, config_{i+1}).
/// Jacobians are taken with respect to the full state tangent of each state.
Vector gp_error_lie(const MarkovState& state_i, const MarkovState& state_next, double dt,
                    Matrix* d_state_i = nullptr, Matrix* d_state_next = nullptr);

/// Two-support-state interpolation coefficients: gamma(tau) = lambda gamma_i + psi gamma_{i+1}.
struct GpInterpCoeffs {
  Matrix lambda;
  Matrix psi;
};

GpInterpCoeffs gp_interp_coeffs(double dt, double tau, const Matrix& qc);

MarkovState interpolate_state(const MarkovState& state_i, const MarkovState& state_next,
                              const GpInterpCoeffs& coeffs);
MarkovState interpolate_state(const MarkovState& state_i, const MarkovState& state_next, double dt,
                              double tau, const Matrix& qc);

/// Interpolated configuration and its Jacobians with respect to both support states.
MobileConfig interpolate_config(const MarkovState& state_i, const MarkovState& state_next,
                                const GpInterpCoeffs& coeffs, Matrix* d_state_i = nullptr,
                                Matrix* d_state_next = nullptr);

}  // namespace steap::gp
