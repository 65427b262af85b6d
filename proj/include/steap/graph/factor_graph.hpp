#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "steap/graph/factor.hpp"

namespace steap {

/// Linear factor |A x - b|^2 over a few variables, already whitened.
struct JacobianFactor {
  std::vector<Key> keys;
  std::vector<Matrix> blocks;
  Vector rhs;

  int rows() const { return static_cast<int>(rhs.size()); }
  double squared_error(const std::map<Key, Vector>& delta) const;
};

/// Linearization of every factor of a graph about a set of values.
struct LinearSystem {
  std::vector<JacobianFactor> factors;
  std::map<Key, int> dims;  ///< tangent dimension per variable

  int rows() const;
  int cols() const;
  /// Column offset of each variable in natural key order.
  std::map<Key, int> column_offsets() const;
  /// Dense [A | b], for checks on small problems.
  Matrix dense_jacobian(Vector* rhs) const;
};

class NonFiniteResidual : public std::runtime_error {
 public:
  NonFiniteResidual(std::size_t factor_index, FactorKind kind);
  std::size_t factor_index() const { return index_; }

 private:
  std::size_t index_;
};

/// Factors plus the current value of every variable.
struct FactorGraph {
  Values values;
  std::vector<FactorPtr> factors;

  void add(FactorPtr f) { factors.push_back(std::move(f)); }
  /// Throws MissingVariable if a factor references a variable without a value.
  void validate() const;
  double error() const { return error(values); }
  double error(const Values& at) const;
};

/// Linearizes f at the given values; rhs = -whitened residual.
JacobianFactor linearize(const Factor& f, const Values& values);
LinearSystem linearize(const std::vector<FactorPtr>& factors, const Values& values);
inline LinearSystem linearize(const FactorGraph& graph) {
  return linearize(graph.factors, graph.values);
}

Values retract(const Values& values, const std::map<Key, Vector>& delta);
Values trajectory_values(const Trajectory& traj, Key first_key = 0);
Trajectory values_trajectory(const Values& values, const std::vector<double>& times);

}  // namespace steap
