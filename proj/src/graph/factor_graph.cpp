#include "steap/graph/factor_graph.hpp"

#include <cmath>
#include <string>

namespace steap {

double JacobianFactor::squared_error(const std::map<Key, Vector>& delta) const {
  Vector r = -rhs;
  for (std::size_t i = 0; i < keys.size(); ++i) r += blocks[i] * delta.at(keys[i]);
  return r.squaredNorm();
}

int LinearSystem::rows() const {
  int n = 0;
  for (const auto& f : factors) n += f.rows();
  return n;
}

int LinearSystem::cols() const {
  int n = 0;
  for (const auto& [k, d] : dims) n += d;
  return n;
}

std::map<Key, int> LinearSystem::column_offsets() const {
  std::map<Key, int> off;
  int c = 0;
  for (const auto& [k, d] : dims) {
    off[k] = c;
    c += d;
  }
  return off;
}

Matrix LinearSystem::dense_jacobian(Vector* rhs) const {
  const auto off = column_offsets();
  Matrix a = Matrix::Zero(rows(), cols());
  if (rhs) rhs->setZero(rows());
  int row = 0;
  for (const auto& f : factors) {
    for (std::size_t i = 0; i < f.keys.size(); ++i) {
      a.block(row, off.at(f.keys[i]), f.rows(), f.blocks[i].cols()) = f.blocks[i];
    }
    if (rhs) rhs->segment(row, f.rows()) = f.rhs;
    row += f.rows();
  }
  return a;
}

NonFiniteResidual::NonFiniteResidual(std::size_t factor_index, FactorKind kind)
    : std::runtime_error("non-finite residual in factor " + std::to_string(factor_index) + " (" +
                         to_string(kind) + ")"),
      index_(factor_index) {}

void FactorGraph::validate() const {
  for (const auto& f : factors) {
    for (Key k : f->keys()) {
      if (!values.contains(k)) throw MissingVariable(k);
    }
  }
}

double FactorGraph::error(const Values& at) const {
  double e = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double fe = factors[i]->error(at);
    if (!std::isfinite(fe)) throw NonFiniteResidual(i, factors[i]->kind());
    e += fe;
  }
  return e;
}

JacobianFactor linearize(const Factor& f, const Values& values) {
  FactorEvaluation ev = f.evaluate(values, true);
  JacobianFactor jf;
  jf.keys = f.keys();
  jf.blocks = std::move(ev.jacobians);
  jf.rhs = -ev.residual;
  return jf;
}

LinearSystem linearize(const std::vector<FactorPtr>& factors, const Values& values) {
  LinearSystem sys;
  sys.factors.reserve(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    JacobianFactor jf = linearize(*factors[i], values);
    if (!jf.rhs.allFinite()) throw NonFiniteResidual(i, factors[i]->kind());
    for (Key k : jf.keys) sys.dims[k] = values.at(k).tangent_dim();
    sys.factors.push_back(std::move(jf));
  }
  return sys;
}

Values retract(const Values& values, const std::map<Key, Vector>& delta) {
  Values out = values;
  for (auto& [k, s] : out) {
    auto it = delta.find(k);
    if (it != delta.end()) s = retract(s, it->second);
  }
  return out;
}

Values trajectory_values(const Trajectory& traj, Key first_key) {
  Values v;
  for (std::size_t i = 0; i < traj.states.size(); ++i) v.emplace(first_key + i, traj.states[i]);
  return v;
}

Trajectory values_trajectory(const Values& values, const std::vector<double>& times) {
  Trajectory t;
  t.times = times;
  for (const auto& [k, s] : values) t.states.push_back(s);
  t.validate();
  return t;
}

}  // namespace steap
