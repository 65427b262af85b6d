#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "steap/inference/elimination.hpp"

namespace steap {

/// Clique F : S of a Bayes tree. Conditionals are kept in elimination order,
/// so the last one is the clique's "head" whose marginal summarizes the subtree.
struct Clique {
  std::vector<Conditional> conditionals;
  std::vector<Key> separator;
  Clique* parent = nullptr;
  std::vector<std::shared_ptr<Clique>> children;

  std::vector<Key> frontals() const;
  /// Factor on `separator` summarizing this clique and everything below it.
  const JacobianFactor& cached_factor() const { return conditionals.back().marginal; }
};

using CliquePtr = std::shared_ptr<Clique>;

class BayesTree {
 public:
  BayesTree() = default;

  /// Builds the tree from a Bayes net given in elimination order.
  static BayesTree build(const std::vector<Conditional>& bayes_net);

  bool empty() const { return roots_.empty(); }
  const std::vector<CliquePtr>& roots() const { return roots_; }
  /// Clique holding `key` as a frontal variable.
  Clique* clique_of(Key key) const;
  /// Shared handle of the clique holding `key` (for identity comparisons).
  CliquePtr shared_clique_of(Key key) const;
  std::size_t clique_count() const;
  std::size_t variable_count() const { return index_.size(); }

  /// Back-substitution from the roots to the leaves.
  std::map<Key, Vector> solve() const;

  /// One line per clique, depth-first from the roots:
  /// "f1 f2 : s1 s2 | parent p1 p2" (parent lists the parent's frontals, "-" for a root).
  std::string dump() const;
  /// Throws std::logic_error when the structural invariants are violated.
  void check_invariants() const;

 private:
  friend class Isam;

  /// Runs tree assembly for a set of conditionals, adding cliques under existing
  /// structure. Returns the new cliques in creation order.
  std::vector<CliquePtr> assemble(const std::vector<Conditional>& bayes_net);
  void index_subtree(Clique* c);

  std::vector<CliquePtr> roots_;
  std::map<Key, Clique*> index_;
};

}  // namespace steap
