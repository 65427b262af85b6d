#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "steap/gp/gp_prior.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace steap::gp {
namespace {

using testing::random_spd;
using testing::random_state;
using testing::random_vector;
using testing::uniform;

TEST(Transition, Examples) {
  EXPECT_EQ(transition_matrix(0.0, 3), Matrix::Identity(6, 6));
  Matrix expected(2, 2);
  expected << 1, 1, 0, 1;
  EXPECT_EQ(transition_matrix(1.0, 1), expected);
}

TEST(Transition, Semigroup) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const double a = uniform(rng, 0, 3), b = uniform(rng, 0, 3);
    EXPECT_LE((transition_matrix(a + b, 4) - transition_matrix(a, 4) * transition_matrix(b, 4)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(ProcessNoise, Examples) {
  const Matrix one = Matrix::Ones(1, 1);
  Matrix q1(2, 2), q2(2, 2);
  q1 << 1.0 / 3.0, 0.5, 0.5, 1.0;
  q2 << 8.0 / 3.0, 2.0, 2.0, 2.0;
  EXPECT_LE((process_noise_cov(1.0, one) - q1).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((process_noise_cov(2.0, one) - q2).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(process_noise_cov(0.0, one), DegenerateInterval);
  EXPECT_THROW(process_noise_cov(-1.0, one), DegenerateInterval);
}

TEST(ProcessNoise, PositiveDefinite) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    const Matrix q = process_noise_cov(uniform(rng, 0.01, 5.0), random_spd(rng, 3));
    EXPECT_LE((q - q.transpose()).norm(), 1e-12);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(q).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(GpParams, Diagonal) {
  const GpParams p = GpParams::diagonal(3, 2, 1.0, 0.5);
  EXPECT_EQ(p.qc.rows(), 5);
  EXPECT_EQ(p.qc(4, 4), 0.5);
  EXPECT_NO_THROW(p.validate());
  GpParams bad = p;
  bad.qc(0, 0) = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(GpErrorVector, ZeroOnConstantVelocity) {
  std::mt19937_64 rng(23);
  const Vector theta = random_vector(rng, 6);
  EXPECT_LE(gp_error_vector(theta, transition_matrix(0.7, 3) * theta, 0.7).norm(), 1e-15);
  Vector rest = theta;
  rest.tail(3).setZero();
  EXPECT_EQ(gp_error_vector(rest, rest, 1.3).norm(), 0.0);
}

TEST(GpErrorVector, MatchesDenseProduct) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 20; ++i) {
    const Vector a = random_vector(rng, 8), b = random_vector(rng, 8);
    const double dt = uniform(rng, 0.1, 2.0);
    Matrix phi = Matrix::Identity(8, 8);
    for (int k = 0; k < 4; ++k) phi(k, k + 4) = dt;
    EXPECT_LE((gp_error_vector(a, b, dt) - (phi * a - b)).norm(), 1e-14);
  }
}

TEST(GpErrorLie, ZeroOnGeodesic) {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 100; ++i) {
    const MarkovState a = random_state(rng, 2);
    const double dt = uniform(rng, 0.1, 2.0);
    const MarkovState b(retract(a.config, a.velocity * dt), a.velocity);
    EXPECT_LE(gp_error_lie(a, b, dt).cwiseAbs().maxCoeff(), 1e-10);
  }
  const MarkovState rest = MarkovState::at_rest(MobileConfig(Se2Pose(1, 2, 0.3), Vector::Zero(2)));
  EXPECT_LE(gp_error_lie(rest, rest, 1.0).norm(), 1e-12);
}

TEST(GpErrorLie, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 100; ++i) {
    const MarkovState a = random_state(rng, 2);
    const MarkovState b = retract(a, random_vector(rng, 10, 0.8));
    const double dt = uniform(rng, 0.2, 1.5);
    Matrix da, db;
    gp_error_lie(a, b, dt, &da, &db);
    const Matrix na = testing::numerical_jacobian(
        [&](const Vector& d) { return gp_error_lie(retract(a, d), b, dt); }, 10);
    const Matrix nb = testing::numerical_jacobian(
        [&](const Vector& d) { return gp_error_lie(a, retract(b, d), dt); }, 10);
    EXPECT_LE(testing::relative_error(da, na), 1e-5);
    EXPECT_LE(testing::relative_error(db, nb), 1e-5);
  }
}

TEST(GpErrorLie, RejectsDegenerateInterval) {
  const MarkovState s = MarkovState::at_rest(MobileConfig(Se2Pose(), Vector::Zero(2)));
  EXPECT_THROW(gp_error_lie(s, s, 0.0), DegenerateInterval);
}

TEST(Interpolation, EndpointCoefficients) {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 20; ++i) {
    const Matrix qc = random_spd(rng, 3);
    const double dt = uniform(rng, 0.1, 3.0);
    const GpInterpCoeffs start = gp_interp_coeffs(dt, 0.0, qc);
    const GpInterpCoeffs end = gp_interp_coeffs(dt, dt, qc);
    EXPECT_LE((start.lambda - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(start.psi.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(end.lambda.cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((end.psi - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_THROW(gp_interp_coeffs(1.0, 1.5, Matrix::Identity(3, 3)), std::out_of_range);
  EXPECT_THROW(gp_interp_coeffs(1.0, -0.1, Matrix::Identity(3, 3)), std::out_of_range);
}

using testing::dense_conditional_mean;

TEST(Interpolation, MidpointMatchesDenseConditioning) {
  std::mt19937_64 rng(28);
  for (int i = 0; i < 100; ++i) {
    const int dof = 1 + i % 4;
    const Matrix qc = random_spd(rng, dof);
    const double dt = uniform(rng, 0.2, 2.0);
    const Vector ti = random_vector(rng, 2 * dof), tj = random_vector(rng, 2 * dof);
    const Vector oracle = dense_conditional_mean(ti, tj, dt, 0.5 * dt, qc, random_spd(rng, 2 * dof, 1.0));
    const GpInterpCoeffs c = gp_interp_coeffs(dt, 0.5 * dt, qc);
    EXPECT_LE((c.lambda * ti + c.psi * tj - oracle).cwiseAbs().maxCoeff(), 1e-8) << i;

    const MarkovState si(MobileConfig::euclidean(ti.head(dof)), ti.tail(dof));
    const MarkovState sj(MobileConfig::euclidean(tj.head(dof)), tj.tail(dof));
    const MarkovState mid = interpolate_state(si, sj, dt, 0.5 * dt, qc);
    EXPECT_LE((mid.config.arm - oracle.head(dof)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((mid.velocity - oracle.tail(dof)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Interpolation, ReproducesEndpoints) {
  std::mt19937_64 rng(29);
  const Matrix qc = Matrix::Identity(5, 5);
  for (int i = 0; i < 20; ++i) {
    const MarkovState a = random_state(rng, 2);
    const MarkovState b = retract(a, random_vector(rng, 10, 0.5));
    const MarkovState s0 = interpolate_state(a, b, 1.0, 0.0, qc);
    const MarkovState s1 = interpolate_state(a, b, 1.0, 1.0, qc);
    EXPECT_LE(local_coordinates(a, s0).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(local_coordinates(b, s1).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Interpolation, GeodesicMidpoint) {
  std::mt19937_64 rng(30);
  const Matrix qc = Matrix::Identity(5, 5) * 0.7;
  for (int i = 0; i < 50; ++i) {
    const MarkovState a = random_state(rng, 2);
    const double dt = uniform(rng, 0.3, 2.0);
    const MarkovState b(retract(a.config, a.velocity * dt), a.velocity);
    const MarkovState mid = interpolate_state(a, b, dt, 0.5 * dt, qc);
    const MobileConfig expected = retract(a.config, a.velocity * 0.5 * dt);
    EXPECT_LE(local_coordinates(expected, mid.config).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((mid.velocity - a.velocity).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Interpolation, ContinuousInTau) {
  std::mt19937_64 rng(31);
  const Matrix qc = Matrix::Identity(5, 5);
  const MarkovState a = random_state(rng, 2);
  const MarkovState b = retract(a, random_vector(rng, 10, 0.5));
  const double dt = 1.2;
  const double norm = std::max(local_coordinates(a, b).norm(), 1.0);
  MarkovState prev = a;
  for (int k = 1; k <= 10000; ++k) {
    const MarkovState cur = interpolate_state(a, b, dt, std::min(dt, k * 1e-4 * dt), qc);
    EXPECT_LE(local_coordinates(prev, cur).norm(), 1e-3 * norm);
    prev = cur;
  }
}

TEST(Interpolation, ConfigJacobians) {
  std::mt19937_64 rng(32);
  const Matrix qc = Matrix::Identity(5, 5);
  for (int i = 0; i < 50; ++i) {
    const MarkovState a = random_state(rng, 2);
    const MarkovState b = retract(a, random_vector(rng, 10, 0.8));
    const double dt = uniform(rng, 0.3, 2.0);
    const GpInterpCoeffs c = gp_interp_coeffs(dt, uniform(rng, 0.05, 0.95) * dt, qc);
    Matrix da, db;
    const MobileConfig at = interpolate_config(a, b, c, &da, &db);
    const Matrix na = testing::numerical_jacobian(
        [&](const Vector& d) { return local_coordinates(at, interpolate_config(retract(a, d), b, c)); }, 10);
    const Matrix nb = testing::numerical_jacobian(
        [&](const Vector& d) { return local_coordinates(at, interpolate_config(a, retract(b, d), c)); }, 10);
    EXPECT_LE(testing::relative_error(da, na), 1e-5);
    EXPECT_LE(testing::relative_error(db, nb), 1e-5);
  }
}

}  // namespace
}  // namespace steap::gp
