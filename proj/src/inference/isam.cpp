#include "steap/inference/isam.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace steap {

std::set<Key> Isam::mark_relinearization(double threshold) const {
  std::set<Key> marked;
  for (const auto& [k, d] : delta_) {
    if (d.size() > 0 && d.lpNorm<Eigen::Infinity>() > threshold) marked.insert(k);
  }
  return marked;
}

double Isam::max_abs_delta() const {
  double m = 0.0;
  for (const auto& [k, d] : delta_) {
    if (d.size() > 0) m = std::max(m, d.lpNorm<Eigen::Infinity>());
  }
  return m;
}

std::vector<std::pair<std::size_t, FactorPtr>> Isam::factors() const {
  std::vector<std::pair<std::size_t, FactorPtr>> out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i]) out.emplace_back(i, factors_[i]);
  }
  return out;
}

const JacobianFactor& Isam::linear_factor(std::size_t slot) {
  auto it = linear_cache_.find(slot);
  if (it == linear_cache_.end()) {
    it = linear_cache_.emplace(slot, linearize(*factors_[slot], theta_)).first;
  }
  return it->second;
}

UpdateStats Isam::update(const std::vector<FactorPtr>& new_factors, const Values& new_values,
                         const std::vector<std::size_t>& remove_slots, bool relinearize) {
  for (const auto& [k, v] : new_values) {
    if (theta_.contains(k)) throw std::invalid_argument("variable " + std::to_string(k) + " already exists");
  }
  for (const auto& f : new_factors) {
    for (Key k : f->keys()) {
      if (!theta_.contains(k) && !new_values.contains(k)) throw MissingVariable(k);
    }
  }
  for (std::size_t s : remove_slots) {
    if (s >= factors_.size() || !factors_[s]) throw std::out_of_range("no factor in slot " + std::to_string(s));
  }

  UpdateStats stats;
  Values previous;
  if (params_.step_control) {
    previous = estimate();
    previous.insert(new_values.begin(), new_values.end());
  }
  std::set<Key> touched;
  std::set<Key> new_factor_keys;

  for (const auto& [k, v] : new_values) {
    theta_.emplace(k, v);
    delta_[k] = Vector::Zero(v.tangent_dim());
    touched.insert(k);
  }
  for (const auto& f : new_factors) {
    const std::size_t slot = factors_.size();
    factors_.push_back(f);
    for (Key k : f->keys()) {
      slots_by_key_[k].push_back(slot);
      touched.insert(k);
      new_factor_keys.insert(k);
    }
    stats.new_factor_slots.push_back(slot);
  }
  for (std::size_t s : remove_slots) {
    for (Key k : factors_[s]->keys()) {
      auto& slots = slots_by_key_[k];
      slots.erase(std::remove(slots.begin(), slots.end(), s), slots.end());
      touched.insert(k);
    }
    factors_[s] = nullptr;
    linear_cache_.erase(s);
  }

  if (relinearize && !tree_.empty()) {
    const std::set<Key> relin = mark_relinearization(params_.relinearize_threshold);
    for (Key k : relin) {
      theta_[k] = retract(theta_.at(k), delta_.at(k));
      delta_[k].setZero();
      for (std::size_t s : slots_by_key_[k]) {
        linear_cache_.erase(s);
        for (Key other : factors_[s]->keys()) touched.insert(other);
      }
    }
    stats.relinearized = relin.size();
  }

  // Detach the cliques holding touched variables together with their ancestors.
  std::unordered_set<const Clique*> removed;
  for (Key k : touched) {
    for (Clique* c = tree_.clique_of(k); c && removed.insert(c).second; c = c->parent) {
    }
  }
  std::set<Key> affected(touched.begin(), touched.end());
  std::vector<CliquePtr> orphans;
  for (const Clique* c : removed) {
    for (const auto& cond : c->conditionals) affected.insert(cond.frontal);
    for (const auto& ch : c->children) {
      if (!removed.contains(ch.get())) orphans.push_back(ch);
    }
  }
  std::erase_if(tree_.roots_, [&](const CliquePtr& r) { return removed.contains(r.get()); });
  for (Key k : affected) tree_.index_.erase(k);
  for (const auto& o : orphans) o->parent = nullptr;

  // Factors entirely inside the detached top are re-linearized (or taken from
  // the cache); each orphan contributes its cached marginal instead.
  std::vector<JacobianFactor> linear;
  std::vector<std::vector<Key>> factor_keys;
  std::set<std::size_t> gathered;
  for (Key k : affected) {
    for (std::size_t s : slots_by_key_[k]) {
      if (gathered.contains(s)) continue;
      const auto& keys = factors_[s]->keys();
      if (std::all_of(keys.begin(), keys.end(), [&](Key x) { return affected.contains(x); })) {
        gathered.insert(s);
        linear.push_back(linear_factor(s));
        factor_keys.push_back(keys);
      }
    }
  }
  for (const auto& o : orphans) {
    linear.push_back(o->cached_factor());
    factor_keys.push_back(o->separator);
  }

  const std::vector<Key> variables(affected.begin(), affected.end());
  const Ordering ordering =
      tree_.empty() && orphans.empty()
          ? compute_ordering(factor_keys, variables, params_.ordering)
          : compute_ordering(factor_keys, variables, OrderingMode::MinDegree, new_factor_keys);

  std::map<Key, int> dims;
  for (Key k : affected) dims[k] = theta_.at(k).tangent_dim();

  const std::vector<Conditional> net = eliminate(std::move(linear), ordering, dims);
  const std::vector<CliquePtr> fresh = tree_.assemble(net);

  std::unordered_map<Key, std::size_t> position;
  for (std::size_t i = 0; i < ordering.size(); ++i) position[ordering[i]] = i;
  for (const auto& o : orphans) {
    const Key first = *std::min_element(o->separator.begin(), o->separator.end(),
                                        [&](Key a, Key b) { return position.at(a) < position.at(b); });
    Clique* parent = tree_.index_.at(first);
    o->parent = parent;
    parent->children.push_back(o);
  }

  solve(fresh);
  if (params_.step_control && max_abs_delta() > params_.relinearize_threshold) {
    stats.step_scale = control_step(previous);
  }
  stats.reeliminated = affected.size();
  stats.reused_subtrees = orphans.size();
  return stats;
}

void Isam::solve(const std::vector<CliquePtr>& fresh) {
  std::unordered_set<const Clique*> must(fresh.size());
  for (const auto& c : fresh) must.insert(c.get());
  std::unordered_set<Key> changed;

  std::vector<const Clique*> stack;
  for (auto it = tree_.roots_.rbegin(); it != tree_.roots_.rend(); ++it) stack.push_back(it->get());
  while (!stack.empty()) {
    const Clique* c = stack.back();
    stack.pop_back();
    bool recompute = must.contains(c);
    for (std::size_t i = 0; !recompute && i < c->separator.size(); ++i) {
      recompute = changed.contains(c->separator[i]);
    }
    if (!recompute) continue;  // nothing below can have moved either
    for (auto it = c->conditionals.rbegin(); it != c->conditionals.rend(); ++it) {
      Vector next = it->solve(delta_);
      Vector& cur = delta_[it->frontal];
      if (cur.size() != next.size() ||
          (next - cur).lpNorm<Eigen::Infinity>() > params_.wildfire_threshold) {
        changed.insert(it->frontal);
      }
      cur = std::move(next);
    }
    for (auto it = c->children.rbegin(); it != c->children.rend(); ++it) stack.push_back(it->get());
  }
}

double Isam::error(const Values& values) const {
  double e = 0.0;
  for (const auto& f : factors_) {
    if (f) e += f->error(values);
  }
  return e;
}

int Isam::converge(int max_passes, double tolerance) {
  int passes = 0;
  while (passes < max_passes && max_abs_delta() > tolerance &&
         !mark_relinearization(params_.relinearize_threshold).empty()) {
    update({}, {}, {}, true);
    ++passes;
  }
  return passes;
}

double Isam::control_step(const Values& previous) {
  double next = error(estimate());
  const double before = error(previous);
  if (next <= before) return 1.0;
  std::map<Key, Vector> base;
  for (const auto& [k, x] : previous) base[k] = local_coordinates(theta_.at(k), x);
  const std::map<Key, Vector> full = delta_;
  double alpha = 1.0;
  for (int i = 0; i < 10 && next > before; ++i) {
    alpha *= 0.5;
    for (auto& [k, d] : delta_) d = base.at(k) + alpha * (full.at(k) - base.at(k));
    next = error(estimate());
  }
  if (next > before) {
    delta_ = base;
    alpha = 0.0;
  }
  return alpha;
}

}  // namespace steap
