#include "steap/inference/elimination.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include <Eigen/QR>

namespace steap {

namespace {

constexpr double kMinPivot = 1e-12;

}  // namespace

IndeterminantSystem::IndeterminantSystem(Key key)
    : std::runtime_error("under-constrained problem: cannot eliminate variable " +
                         std::to_string(key)),
      key_(key) {}

Vector Conditional::solve(const std::map<Key, Vector>& delta) const {
  Vector rhs = d;
  int col = 0;
  for (std::size_t i = 0; i < separator.size(); ++i) {
    rhs.noalias() -= s.middleCols(col, separator_dims[i]) * delta.at(separator[i]);
    col += separator_dims[i];
  }
  return r.triangularView<Eigen::Upper>().solve(rhs);
}

std::vector<Conditional> eliminate(std::vector<JacobianFactor> factors, const Ordering& ordering,
                                   const std::map<Key, int>& dims) {
  std::unordered_map<Key, std::size_t> position;
  for (std::size_t i = 0; i < ordering.size(); ++i) position[ordering[i]] = i;

  std::vector<bool> alive(factors.size(), true);
  std::unordered_map<Key, std::vector<std::size_t>> touching;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (Key k : factors[i].keys) touching[k].push_back(i);
  }

  std::vector<Conditional> net;
  net.reserve(ordering.size());
  for (Key j : ordering) {
    const int dj = dims.at(j);
    std::vector<std::size_t> used;
    for (std::size_t fi : touching[j]) {
      if (alive[fi]) {
        used.push_back(fi);
        alive[fi] = false;
      }
    }
    touching.erase(j);

    std::vector<Key> sep;
    int rows = 0;
    for (std::size_t fi : used) {
      rows += factors[fi].rows();
      for (Key k : factors[fi].keys) {
        if (k != j && std::find(sep.begin(), sep.end(), k) == sep.end()) sep.push_back(k);
      }
    }
    std::sort(sep.begin(), sep.end(), [&](Key a, Key b) { return position.at(a) < position.at(b); });

    std::unordered_map<Key, int> col_of;
    col_of[j] = 0;
    int cols = dj;
    std::vector<int> sep_dims;
    for (Key k : sep) {
      col_of[k] = cols;
      sep_dims.push_back(dims.at(k));
      cols += dims.at(k);
    }
    if (rows < dj) throw IndeterminantSystem(j);

    Matrix stacked = Matrix::Zero(rows, cols + 1);
    int row = 0;
    for (std::size_t fi : used) {
      const JacobianFactor& f = factors[fi];
      for (std::size_t b = 0; b < f.keys.size(); ++b) {
        stacked.block(row, col_of.at(f.keys[b]), f.rows(), f.blocks[b].cols()) = f.blocks[b];
      }
      stacked.block(row, cols, f.rows(), 1) = f.rhs;
      row += f.rows();
    }

    Eigen::HouseholderQR<Matrix> qr(stacked);
    const Matrix& packed = qr.matrixQR();
    const int kept = std::min(rows, cols);

    Conditional c;
    c.frontal = j;
    c.separator = sep;
    c.separator_dims = sep_dims;
    c.r = packed.topLeftCorner(dj, dj).triangularView<Eigen::Upper>();
    c.s = packed.block(0, dj, dj, cols - dj);
    c.d = packed.block(0, cols, dj, 1);
    for (int i = 0; i < dj; ++i) {
      if (!(std::abs(c.r(i, i)) > kMinPivot)) throw IndeterminantSystem(j);
    }

    if (!sep.empty() && kept > dj) {
      const int mrows = kept - dj;
      JacobianFactor& m = c.marginal;
      m.keys = sep;
      int col = dj;
      for (std::size_t i = 0; i < sep.size(); ++i) {
        Matrix block = packed.block(dj, col, mrows, sep_dims[i]);
        // only the upper-triangular part of the packed QR belongs to R
        for (int r = 0; r < mrows; ++r) {
          const int global_row = dj + r;
          for (int cc = 0; cc < sep_dims[i]; ++cc) {
            if (col + cc < global_row) block(r, cc) = 0.0;
          }
        }
        m.blocks.push_back(std::move(block));
        col += sep_dims[i];
      }
      m.rhs = packed.block(dj, cols, mrows, 1);
      for (Key k : sep) touching[k].push_back(factors.size());
      factors.push_back(m);
      alive.push_back(true);
    }
    net.push_back(std::move(c));
  }
  return net;
}

std::map<Key, Vector> back_substitute(const std::vector<Conditional>& bayes_net) {
  std::map<Key, Vector> delta;
  for (auto it = bayes_net.rbegin(); it != bayes_net.rend(); ++it) {
    delta[it->frontal] = it->solve(delta);
  }
  return delta;
}

}  // namespace steap
