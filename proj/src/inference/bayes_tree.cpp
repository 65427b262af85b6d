#include "steap/inference/bayes_tree.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace steap {

std::vector<Key> Clique::frontals() const {
  std::vector<Key> f;
  f.reserve(conditionals.size());
  for (const auto& c : conditionals) f.push_back(c.frontal);
  return f;
}

BayesTree BayesTree::build(const std::vector<Conditional>& bayes_net) {
  BayesTree tree;
  tree.assemble(bayes_net);
  return tree;
}

std::vector<CliquePtr> BayesTree::assemble(const std::vector<Conditional>& bayes_net) {
  std::vector<CliquePtr> created;
  for (auto it = bayes_net.rbegin(); it != bayes_net.rend(); ++it) {
    const Conditional& cond = *it;
    if (cond.separator.empty()) {
      auto root = std::make_shared<Clique>();
      root->conditionals.push_back(cond);
      index_[cond.frontal] = root.get();
      roots_.push_back(root);
      created.push_back(root);
      continue;
    }
    // separator is sorted by elimination position, so front() was eliminated first
    Clique* parent = index_.at(cond.separator.front());
    std::set<Key> parent_vars(parent->separator.begin(), parent->separator.end());
    for (const auto& c : parent->conditionals) parent_vars.insert(c.frontal);
    const std::set<Key> sep(cond.separator.begin(), cond.separator.end());
    const bool merge = std::includes(sep.begin(), sep.end(), parent_vars.begin(), parent_vars.end());
    if (merge) {
      parent->conditionals.insert(parent->conditionals.begin(), cond);
      index_[cond.frontal] = parent;
      std::vector<Key> merged_sep;
      for (Key k : cond.separator) {
        if (index_.at(k) != parent) merged_sep.push_back(k);
      }
      parent->separator = std::move(merged_sep);
      continue;
    }
    auto child = std::make_shared<Clique>();
    child->conditionals.push_back(cond);
    child->separator = cond.separator;
    child->parent = parent;
    parent->children.push_back(child);
    index_[cond.frontal] = child.get();
    created.push_back(child);
  }
  return created;
}

void BayesTree::index_subtree(Clique* c) {
  for (const auto& cond : c->conditionals) index_[cond.frontal] = c;
  for (const auto& ch : c->children) index_subtree(ch.get());
}

Clique* BayesTree::clique_of(Key key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : it->second;
}

CliquePtr BayesTree::shared_clique_of(Key key) const {
  Clique* c = clique_of(key);
  if (!c) return nullptr;
  const auto& siblings = c->parent ? c->parent->children : roots_;
  for (const auto& s : siblings) {
    if (s.get() == c) return s;
  }
  return nullptr;
}

std::size_t BayesTree::clique_count() const {
  std::set<const Clique*> cliques;
  for (const auto& [k, c] : index_) cliques.insert(c);
  return cliques.size();
}

std::map<Key, Vector> BayesTree::solve() const {
  std::map<Key, Vector> delta;
  std::vector<const Clique*> stack;
  for (auto it = roots_.rbegin(); it != roots_.rend(); ++it) stack.push_back(it->get());
  while (!stack.empty()) {
    const Clique* c = stack.back();
    stack.pop_back();
    for (auto it = c->conditionals.rbegin(); it != c->conditionals.rend(); ++it) {
      delta[it->frontal] = it->solve(delta);
    }
    for (auto it = c->children.rbegin(); it != c->children.rend(); ++it) stack.push_back(it->get());
  }
  return delta;
}

namespace {

void dump_clique(const Clique& c, std::ostringstream& out) {
  const auto join = [&](const std::vector<Key>& keys) {
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? " " : "") << keys[i];
  };
  join(c.frontals());
  out << " :";
  for (Key k : c.separator) out << ' ' << k;
  out << " | parent ";
  if (c.parent) {
    join(c.parent->frontals());
  } else {
    out << '-';
  }
  out << '\n';
  for (const auto& ch : c.children) dump_clique(*ch, out);
}

void check_clique(const Clique& c, std::map<Key, int>& seen) {
  if (c.conditionals.empty()) throw std::logic_error("clique without conditionals");
  std::set<Key> frontal;
  for (const auto& cond : c.conditionals) {
    frontal.insert(cond.frontal);
    ++seen[cond.frontal];
  }
  for (Key s : c.separator) {
    if (frontal.contains(s)) throw std::logic_error("variable both frontal and separator");
  }
  if (c.parent) {
    std::set<Key> parent_vars(c.parent->separator.begin(), c.parent->separator.end());
    for (const auto& cond : c.parent->conditionals) parent_vars.insert(cond.frontal);
    for (Key s : c.separator) {
      if (!parent_vars.contains(s)) throw std::logic_error("separator not contained in parent");
    }
  } else if (!c.separator.empty()) {
    throw std::logic_error("root clique with a separator");
  }
  for (const auto& ch : c.children) {
    if (ch->parent != &c) throw std::logic_error("broken parent link");
    check_clique(*ch, seen);
  }
}

}  // namespace

std::string BayesTree::dump() const {
  std::ostringstream out;
  for (const auto& r : roots_) dump_clique(*r, out);
  return out.str();
}

void BayesTree::check_invariants() const {
  std::map<Key, int> seen;
  for (const auto& r : roots_) check_clique(*r, seen);
  for (const auto& [k, n] : seen) {
    if (n != 1) throw std::logic_error("variable " + std::to_string(k) + " frontal " +
                                       std::to_string(n) + " times");
    auto it = index_.find(k);
    if (it == index_.end()) throw std::logic_error("variable missing from clique index");
  }
  if (seen.size() != index_.size()) throw std::logic_error("clique index out of sync");
}

}  // namespace steap
