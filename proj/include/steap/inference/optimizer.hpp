#pragma once

#include <string>

#include "steap/inference/elimination.hpp"

namespace steap {

enum class SolverKind { LevenbergMarquardt, GaussNewton };

struct SolverConfig {
  SolverKind kind = SolverKind::LevenbergMarquardt;
  double initial_lambda = 1e-5;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  double max_lambda = 1e10;
  double relative_tolerance = 1e-6;
  double absolute_tolerance = 1e-8;  ///< on the infinity norm of the step
  int max_iterations = 100;
  OrderingMode ordering = OrderingMode::Natural;
};

struct OptimizeReport {
  int iterations = 0;
  double initial_error = 0.0;
  double final_error = 0.0;
  bool converged = false;
  std::string reason;
};

/// Damped Gauss-Newton on the factor graph, each linear step solved by QR
/// elimination. Returns the best iterate; `report` says why it stopped.
Values optimize_batch(const FactorGraph& graph, const SolverConfig& cfg = {},
                      OptimizeReport* report = nullptr);

}  // namespace steap
