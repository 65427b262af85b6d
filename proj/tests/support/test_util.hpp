#pragma once

#include <cmath>
#include <random>

#include "steap/graph/factor.hpp"

namespace steap::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

inline MobileConfig random_config(std::mt19937_64& rng, int arm_dim, double extent = 3.0) {
  return MobileConfig(Se2Pose(uniform(rng, -extent, extent), uniform(rng, -extent, extent),
                              uniform(rng, -3.0, 3.0)),
                      random_vector(rng, arm_dim, 1.5));
}

inline MarkovState random_state(std::mt19937_64& rng, int arm_dim, double extent = 3.0) {
  MobileConfig c = random_config(rng, arm_dim, extent);
  const int d = c.tangent_dim();
  return MarkovState(std::move(c), random_vector(rng, d));
}

inline Matrix random_spd(std::mt19937_64& rng, int n, double floor = 0.2) {
  const Matrix a = random_vector(rng, n * n).reshaped(n, n);
  return a * a.transpose() + floor * Matrix::Identity(n, n);
}

/// Central differences of f(retract(x, d)) around d = 0.
template <class F>
Matrix numerical_jacobian(F&& f, int in_dim, double h = 1e-6) {
  Matrix j;
  for (int k = 0; k < in_dim; ++k) {
    Vector d = Vector::Zero(in_dim);
    d[k] = h;
    const Vector plus = f(d);
    d[k] = -h;
    const Vector minus = f(d);
    if (j.size() == 0) j.resize(plus.size(), in_dim);
    j.col(k) = (plus - minus) / (2 * h);
  }
  return j;
}

/// Frobenius-norm relative error with a unit floor on the reference.
inline double relative_error(const Matrix& actual, const Matrix& expected) {
  return (actual - expected).norm() / std::max(expected.norm(), 1.0);
}

/// Largest relative Jacobian error of a factor's whitened Jacobians at `values`.
inline double factor_jacobian_error(const Factor& f, const Values& values, double h = 1e-6) {
  const FactorEvaluation ev = f.evaluate(values);
  double worst = 0.0;
  for (std::size_t b = 0; b < f.keys().size(); ++b) {
    const Key key = f.keys()[b];
    const MarkovState& x = values.at(key);
    const Matrix num = numerical_jacobian(
        [&](const Vector& d) {
          Values moved = values;
          moved[key] = retract(x, d);
          return Vector(f.evaluate(moved, false).residual);
        },
        x.tangent_dim(), h);
    worst = std::max(worst, relative_error(ev.jacobians[b], num));
  }
  return worst;
}

}  // namespace steap::testing
