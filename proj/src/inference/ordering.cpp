#include "steap/inference/ordering.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace steap {

namespace {

using Adjacency = std::map<Key, std::set<Key>>;

Adjacency build_adjacency(const std::vector<std::vector<Key>>& factor_keys,
                          const std::vector<Key>& variables) {
  Adjacency adj;
  for (Key v : variables) adj[v];
  for (const auto& keys : factor_keys) {
    for (Key a : keys) {
      if (!adj.contains(a)) continue;
      for (Key b : keys) {
        if (a != b && adj.contains(b)) adj[a].insert(b);
      }
    }
  }
  return adj;
}

// Removes v and connects its remaining neighbours; returns the number of new edges.
std::size_t eliminate_vertex(Adjacency& adj, Key v) {
  std::size_t fill = 0;
  const std::set<Key> nbrs = std::move(adj[v]);
  adj.erase(v);
  for (Key a : nbrs) {
    auto& na = adj[a];
    na.erase(v);
    for (Key b : nbrs) {
      if (a < b && !na.contains(b)) {
        na.insert(b);
        adj[b].insert(a);
        ++fill;
      }
    }
  }
  return fill;
}

}  // namespace

const char* to_string(OrderingMode mode) {
  return mode == OrderingMode::Natural ? "natural" : "min-degree";
}

OrderingMode ordering_mode_from_string(const std::string& name) {
  if (name == "natural") return OrderingMode::Natural;
  if (name == "min-degree" || name == "min_degree") return OrderingMode::MinDegree;
  throw std::invalid_argument("unknown ordering mode '" + name + "'");
}

Ordering compute_ordering(const std::vector<std::vector<Key>>& factor_keys,
                          const std::vector<Key>& variables, OrderingMode mode,
                          const std::set<Key>& constrained_last) {
  Ordering order;
  order.reserve(variables.size());
  if (mode == OrderingMode::Natural) {
    std::vector<Key> free_keys, last_keys;
    for (Key k : variables) (constrained_last.contains(k) ? last_keys : free_keys).push_back(k);
    std::sort(free_keys.begin(), free_keys.end());
    std::sort(last_keys.begin(), last_keys.end());
    order = free_keys;
    order.insert(order.end(), last_keys.begin(), last_keys.end());
    return order;
  }

  Adjacency adj = build_adjacency(factor_keys, variables);
  while (!adj.empty()) {
    bool only_constrained = true;
    for (const auto& [k, n] : adj) {
      if (!constrained_last.contains(k)) {
        only_constrained = false;
        break;
      }
    }
    Key best = 0;
    std::size_t best_degree = std::numeric_limits<std::size_t>::max();
    for (const auto& [k, n] : adj) {  // ascending key, so strict < keeps the lowest id on ties
      if (!only_constrained && constrained_last.contains(k)) continue;
      if (n.size() < best_degree) {
        best = k;
        best_degree = n.size();
      }
    }
    eliminate_vertex(adj, best);
    order.push_back(best);
  }
  return order;
}

Ordering compute_ordering(const FactorGraph& graph, OrderingMode mode) {
  if (graph.values.empty()) throw std::invalid_argument("cannot order an empty graph");
  std::vector<Key> vars;
  for (const auto& [k, v] : graph.values) vars.push_back(k);
  std::vector<std::vector<Key>> keys;
  keys.reserve(graph.factors.size());
  for (const auto& f : graph.factors) keys.push_back(f->keys());
  return compute_ordering(keys, vars, mode);
}

std::size_t elimination_fill(const std::vector<std::vector<Key>>& factor_keys,
                             const Ordering& ordering) {
  Adjacency adj = build_adjacency(factor_keys, ordering);
  std::size_t fill = 0;
  for (Key v : ordering) fill += eliminate_vertex(adj, v);
  return fill;
}

}  // namespace steap
