#include "steap/inference/optimizer.hpp"

#include <cmath>

namespace steap {

namespace {

double max_norm(const std::map<Key, Vector>& delta) {
  double m = 0.0;
  for (const auto& [k, d] : delta) {
    if (d.size() > 0) m = std::max(m, d.lpNorm<Eigen::Infinity>());
  }
  return m;
}

}  // namespace

Values optimize_batch(const FactorGraph& graph, const SolverConfig& cfg, OptimizeReport* report) {
  graph.validate();
  OptimizeReport rep;
  const Ordering ordering = compute_ordering(graph, cfg.ordering);
  const bool damped = cfg.kind == SolverKind::LevenbergMarquardt;

  Values current = graph.values;
  double error = graph.error(current);
  rep.initial_error = error;
  double lambda = cfg.initial_lambda;

  while (rep.iterations < cfg.max_iterations) {
    ++rep.iterations;
    const LinearSystem system = linearize(graph.factors, current);

    bool accepted = false;
    while (!accepted) {
      std::vector<JacobianFactor> factors = system.factors;
      if (damped) {
        const double s = std::sqrt(lambda);
        for (const auto& [k, d] : system.dims) {
          factors.push_back({{k}, {Matrix::Identity(d, d) * s}, Vector::Zero(d)});
        }
      }
      const std::map<Key, Vector> delta = back_substitute(eliminate(std::move(factors), ordering, system.dims));
      if (max_norm(delta) < cfg.absolute_tolerance) {
        rep.converged = true;
        rep.reason = "step below absolute tolerance";
        break;
      }
      Values trial = retract(current, delta);
      double trial_error = graph.error(trial);
      if (!damped && !(trial_error <= error)) {
        // Backtrack along the Gauss-Newton step; give up after ten halvings.
        std::map<Key, Vector> step = delta;
        for (int i = 0; i < 10 && !(trial_error <= error); ++i) {
          for (auto& [k, d] : step) d *= 0.5;
          trial = retract(current, step);
          trial_error = graph.error(trial);
        }
        if (!(trial_error <= error)) {
          rep.converged = true;
          rep.reason = "no descent along the step";
          break;
        }
      }
      if (!damped || (std::isfinite(trial_error) && trial_error <= error)) {
        const double decrease = error - trial_error;
        current = std::move(trial);
        accepted = true;
        if (damped) lambda = std::max(lambda * cfg.lambda_down, 1e-12);
        if (std::abs(decrease) < cfg.relative_tolerance * std::max(error, 1e-300)) {
          rep.converged = true;
          rep.reason = "relative decrease below tolerance";
        }
        error = trial_error;
      } else {
        lambda *= cfg.lambda_up;
        if (lambda > cfg.max_lambda) {
          rep.reason = "damping exceeded its limit";
          break;
        }
      }
    }
    if (!accepted || rep.converged) break;
  }
  if (!rep.converged && rep.reason.empty()) rep.reason = "iteration limit reached";
  rep.final_error = error;
  if (report) *report = rep;
  return current;
}

}  // namespace steap
