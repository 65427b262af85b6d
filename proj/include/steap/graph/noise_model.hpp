#pragma once

#include "steap/core/state.hpp"

namespace steap {

/// Gaussian noise model. Whitening multiplies by W = L^T where L L^T = Sigma^{-1},
/// so that |W e|^2 = e^T Sigma^{-1} e.
class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel from_covariance(const Matrix& covariance);
  static NoiseModel isotropic(int dim, double sigma);
  static NoiseModel from_sigmas(const Vector& sigmas);

  int dim() const { return static_cast<int>(covariance_.rows()); }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& sqrt_information() const { return sqrt_info_; }

  Vector whiten(const Vector& e) const;
  Matrix whiten(const Matrix& h) const;

 private:
  Matrix covariance_;
  Matrix sqrt_info_;
  bool diagonal_ = false;
};

}  // namespace steap
