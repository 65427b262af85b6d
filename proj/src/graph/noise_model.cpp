#include "steap/graph/noise_model.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace steap {

NoiseModel NoiseModel::from_covariance(const Matrix& covariance) {
  if (covariance.rows() == 0 || covariance.rows() != covariance.cols()) {
    throw std::invalid_argument("noise covariance must be square and non-empty");
  }
  NoiseModel m;
  m.covariance_ = covariance;
  const Matrix off = covariance - Matrix(covariance.diagonal().asDiagonal());
  if (off.cwiseAbs().maxCoeff() == 0.0) {
    if ((covariance.diagonal().array() <= 0.0).any()) {
      throw std::invalid_argument("noise covariance must be positive definite");
    }
    m.diagonal_ = true;
    m.sqrt_info_ = covariance.diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
    return m;
  }
  const Matrix information = covariance.inverse();
  Eigen::LLT<Matrix> llt(0.5 * (information + information.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("noise covariance must be positive definite");
  }
  m.sqrt_info_ = llt.matrixL().transpose();
  return m;
}

NoiseModel NoiseModel::isotropic(int dim, double sigma) {
  return from_sigmas(Vector::Constant(dim, sigma));
}

NoiseModel NoiseModel::from_sigmas(const Vector& sigmas) {
  return from_covariance(Matrix(sigmas.array().square().matrix().asDiagonal()));
}

Vector NoiseModel::whiten(const Vector& e) const {
  if (diagonal_) return sqrt_info_.diagonal().cwiseProduct(e);
  return sqrt_info_ * e;
}

Matrix NoiseModel::whiten(const Matrix& h) const {
  if (diagonal_) return sqrt_info_.diagonal().asDiagonal() * h;
  return sqrt_info_ * h;
}

}  // namespace steap
