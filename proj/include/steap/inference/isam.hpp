#pragma once

#include <map>
#include <set>
#include <vector>

#include "steap/inference/bayes_tree.hpp"

namespace steap {

struct IsamParams {
  /// Variables whose delta infinity-norm exceeds this are relinearized on the next update.
  double relinearize_threshold = 0.1;
  /// Ordering for the first (batch) elimination. Later updates re-order only the
  /// detached top with minimum degree, keeping variables of new factors last.
  OrderingMode ordering = OrderingMode::Natural;
  /// A detached-and-reattached subtree is re-solved only when its separator delta
  /// moved by more than this (0 re-solves on any change).
  double wildfire_threshold = 0.0;
  /// When the new solution moves some variable by more than relinearize_threshold
  /// and raises the nonlinear error over the previous estimate, the step is halved
  /// (at most 10 times) back towards that estimate.
  bool step_control = true;
};

struct UpdateStats {
  std::size_t reeliminated = 0;   ///< variables in the re-eliminated top (V)
  std::size_t relinearized = 0;   ///< variables whose linearization point moved
  std::size_t reused_subtrees = 0;
  double step_scale = 1.0;  ///< < 1 when step control shortened the update
  std::vector<std::size_t> new_factor_slots;
};

/// Incremental smoother over a Bayes tree with fluid relinearization.
class Isam {
 public:
  explicit Isam(IsamParams params = {}) : params_(params) {}

  /// Adds factors (and initial values for brand-new variables), removes factor
  /// slots, relinearizes marked variables, re-eliminates the affected top of the
  /// tree and reattaches untouched subtrees.
  UpdateStats update(const std::vector<FactorPtr>& new_factors = {},
                     const Values& new_values = {},
                     const std::vector<std::size_t>& remove_slots = {}, bool relinearize = true);

  /// Repeats relinearize/solve passes while some variable exceeds the threshold and
  /// the largest delta component is above `tolerance`. Returns the number of passes.
  int converge(int max_passes, double tolerance);

  /// Nonlinear objective of the live factors at `values`.
  double error(const Values& values) const;

  /// Variables whose current delta infinity-norm exceeds `threshold`.
  std::set<Key> mark_relinearization(double threshold) const;

  Values estimate() const { return retract(theta_, delta_); }
  const Values& linearization_point() const { return theta_; }
  const std::map<Key, Vector>& delta() const { return delta_; }
  double max_abs_delta() const;
  const BayesTree& tree() const { return tree_; }
  const IsamParams& params() const { return params_; }
  IsamParams& params() { return params_; }

  /// Live nonlinear factors (slot, factor).
  std::vector<std::pair<std::size_t, FactorPtr>> factors() const;
  FactorPtr factor(std::size_t slot) const { return factors_.at(slot); }

 private:
  const JacobianFactor& linear_factor(std::size_t slot);
  /// Top-down back-substitution; untouched subtrees are visited only while
  /// their separator keeps moving (wildfire).
  void solve(const std::vector<CliquePtr>& fresh);
  /// Shortens the step from `previous` to the current estimate until the error drops.
  double control_step(const Values& previous);

  IsamParams params_;
  Values theta_;
  std::map<Key, Vector> delta_;
  std::vector<FactorPtr> factors_;
  std::map<Key, std::vector<std::size_t>> slots_by_key_;
  std::map<std::size_t, JacobianFactor> linear_cache_;
  BayesTree tree_;
};

}  // namespace steap
