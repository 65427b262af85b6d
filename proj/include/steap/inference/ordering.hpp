#pragma once

#include <set>
#include <vector>

#include "steap/graph/factor_graph.hpp"

namespace steap {

using Ordering = std::vector<Key>;

enum class OrderingMode {
  Natural,    ///< ascending key: start-to-goal on a trajectory chain
  MinDegree,  ///< minimum degree, ties broken by lowest key
};

const char* to_string(OrderingMode mode);
OrderingMode ordering_mode_from_string(const std::string& name);

/// Orders `variables` given the key sets of the factors connecting them. Keys in
/// `constrained_last` are placed after all others (each group ordered by `mode`).
Ordering compute_ordering(const std::vector<std::vector<Key>>& factor_keys,
                          const std::vector<Key>& variables, OrderingMode mode,
                          const std::set<Key>& constrained_last = {});

Ordering compute_ordering(const FactorGraph& graph, OrderingMode mode);

/// Number of edges added to the variable adjacency graph when eliminating in this order.
std::size_t elimination_fill(const std::vector<std::vector<Key>>& factor_keys,
                             const Ordering& ordering);

}  // namespace steap
