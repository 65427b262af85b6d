#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "steap/graph/factor_graph.hpp"
#include "steap/inference/ordering.hpp"

namespace steap {

/// Square-root Gaussian conditional p(frontal | separator):
/// R x_f + S x_s = d with R upper triangular.
struct Conditional {
  Key frontal = 0;
  std::vector<Key> separator;  ///< in elimination order
  std::vector<int> separator_dims;
  Matrix r;
  Matrix s;
  Vector d;
  /// Factor on the separator produced by this elimination step.
  JacobianFactor marginal;

  int dim() const { return static_cast<int>(d.size()); }
  /// Solves for the frontal given separator values already in `delta`.
  Vector solve(const std::map<Key, Vector>& delta) const;
};

class IndeterminantSystem : public std::runtime_error {
 public:
  explicit IndeterminantSystem(Key key);
  Key key() const { return key_; }

 private:
  Key key_;
};

/// Eliminates variables one at a time in `ordering`: every factor touching the
/// variable is stacked and QR-factorized into a conditional and a new factor on
/// the separator.
std::vector<Conditional> eliminate(std::vector<JacobianFactor> factors, const Ordering& ordering,
                                   const std::map<Key, int>& dims);

inline std::vector<Conditional> eliminate(const LinearSystem& system, const Ordering& ordering) {
  return eliminate(system.factors, ordering, system.dims);
}

/// Solves a Bayes net given in elimination order, last conditional first.
std::map<Key, Vector> back_substitute(const std::vector<Conditional>& bayes_net);

}  // namespace steap
