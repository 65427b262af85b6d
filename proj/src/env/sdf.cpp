#include "steap/env/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace steap::env {

namespace {

constexpr double kInf = 1e20;

// 1D lower envelope of parabolas rooted at f[q].
void transform_1d(const double* f, int n, int stride, double* out, int out_stride,
                  std::vector<int>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    const double fq = f[q * stride];
    if (fq >= kInf) continue;
    double s = 0.0;
    while (k >= 0) {
      const int p = v[k];
      const double fp = f[p * stride];
      s = ((fq + double(q) * q) - (fp + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) out[q * out_stride] = kInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = q - v[j];
    out[q * out_stride] = diff * diff + f[v[j] * stride];
  }
}

}  // namespace

OccupancyGrid rasterize(const WorldSpec& world) {
  world.validate();
  OccupancyGrid g;
  g.cell_size = world.cell_size;
  g.origin = world.lower_corner();
  g.cols = static_cast<int>(std::floor(world.width / world.cell_size + 1e-9)) + 1;
  g.rows = static_cast<int>(std::floor(world.height / world.cell_size + 1e-9)) + 1;
  g.occupied.assign(static_cast<std::size_t>(g.cols) * g.rows, 0);
  for (const Box& b : world.obstacles) {
    const Eigen::Vector2d lo = (b.center - 0.5 * b.size - g.origin) / g.cell_size;
    const Eigen::Vector2d hi = (b.center + 0.5 * b.size - g.origin) / g.cell_size;
    const int c0 = std::max(0, static_cast<int>(std::ceil(lo.x() - 1e-9)));
    const int c1 = std::min(g.cols - 1, static_cast<int>(std::floor(hi.x() + 1e-9)));
    const int r0 = std::max(0, static_cast<int>(std::ceil(lo.y() - 1e-9)));
    const int r1 = std::min(g.rows - 1, static_cast<int>(std::floor(hi.y() + 1e-9)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) g.occupied[static_cast<std::size_t>(r) * g.cols + c] = 1;
    }
  }
  return g;
}

std::vector<double> squared_distance_transform(const std::vector<unsigned char>& target, int cols,
                                               int rows) {
  const std::size_t n = static_cast<std::size_t>(cols) * rows;
  if (target.size() != n) throw std::invalid_argument("grid size mismatch");
  std::vector<double> f(n), tmp(n), out(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = target[i] ? 0.0 : kInf;
  std::vector<int> v;
  std::vector<double> z;
  for (int c = 0; c < cols; ++c) transform_1d(&f[c], rows, cols, &tmp[c], cols, v, z);
  for (int r = 0; r < rows; ++r) {
    const std::size_t off = static_cast<std::size_t>(r) * cols;
    transform_1d(&tmp[off], cols, 1, &out[off], 1, v, z);
  }
  return out;
}

SignedDistanceField::SignedDistanceField(int cols, int rows, Eigen::Vector2d origin,
                                         double cell_size, std::vector<double> values)
    : cols_(cols), rows_(rows), origin_(std::move(origin)), cell_size_(cell_size),
      values_(std::move(values)) {
  if (cols_ < 2 || rows_ < 2) throw std::invalid_argument("SDF grid needs at least 2x2 nodes");
  if (!(cell_size_ > 0.0)) throw std::invalid_argument("SDF cell size must be positive");
  if (values_.size() != static_cast<std::size_t>(cols_) * rows_) {
    throw std::invalid_argument("SDF value count does not match grid size");
  }
}

SignedDistanceField SignedDistanceField::from_occupancy(const OccupancyGrid& grid) {
  std::vector<unsigned char> free(grid.occupied.size());
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = grid.occupied[i] ? 0 : 1;
  const std::vector<double> to_occupied = squared_distance_transform(grid.occupied, grid.cols, grid.rows);
  const std::vector<double> to_free = squared_distance_transform(free, grid.cols, grid.rows);
  std::vector<double> values(grid.occupied.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (grid.occupied[i]) {
      values[i] = to_free[i] >= kInf ? -kUnboundedDistance : -std::sqrt(to_free[i]) * grid.cell_size;
    } else {
      values[i] = to_occupied[i] >= kInf ? kUnboundedDistance
                                         : std::sqrt(to_occupied[i]) * grid.cell_size;
    }
  }
  return {grid.cols, grid.rows, grid.origin, grid.cell_size, std::move(values)};
}

SignedDistanceField build_sdf(const WorldSpec& world) {
  return SignedDistanceField::from_occupancy(rasterize(world));
}

SdfSample SignedDistanceField::query(const Eigen::Vector2d& point) const {
  SdfSample s;
  const double max_x = (cols_ - 1), max_y = (rows_ - 1);
  double fx = (point.x() - origin_.x()) / cell_size_;
  double fy = (point.y() - origin_.y()) / cell_size_;
  if (fx < 0.0 || fx > max_x || fy < 0.0 || fy > max_y || !std::isfinite(fx) || !std::isfinite(fy)) {
    s.clamped = true;
    fx = std::clamp(std::isfinite(fx) ? fx : 0.0, 0.0, max_x);
    fy = std::clamp(std::isfinite(fy) ? fy : 0.0, 0.0, max_y);
  }
  const int ix = std::min(static_cast<int>(std::floor(fx)), cols_ - 2);
  const int iy = std::min(static_cast<int>(std::floor(fy)), rows_ - 2);
  const double tx = fx - ix, ty = fy - iy;

  const double v00 = at(ix, iy), v10 = at(ix + 1, iy), v01 = at(ix, iy + 1), v11 = at(ix + 1, iy + 1);
  s.distance = (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;

  auto slope_x = [&](int cx, int cy, double wy) {
    return ((1 - wy) * (at(cx + 1, cy) - at(cx, cy)) + wy * (at(cx + 1, cy + 1) - at(cx, cy + 1))) /
           cell_size_;
  };
  auto slope_y = [&](int cx, int cy, double wx) {
    return ((1 - wx) * (at(cx, cy + 1) - at(cx, cy)) + wx * (at(cx + 1, cy + 1) - at(cx + 1, cy))) /
           cell_size_;
  };
  double gx = slope_x(ix, iy, ty);
  if (tx == 0.0 && ix > 0) gx = 0.5 * (gx + slope_x(ix - 1, iy, ty));
  double gy = slope_y(ix, iy, tx);
  if (ty == 0.0 && iy > 0) gy = 0.5 * (gy + slope_y(ix, iy - 1, tx));
  s.gradient = {gx, gy};
  return s;
}

void SignedDistanceField::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SDF file " + path);
  out << "steap-sdf 1\n";
  out << "size " << cols_ << ' ' << rows_ << '\n';
  out << std::setprecision(17);
  out << "origin " << origin_.x() << ' ' << origin_.y() << '\n';
  out << "cell_size " << cell_size_ << '\n';
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out << (c ? " " : "") << at(c, r);
    out << '\n';
  }
}

SignedDistanceField SignedDistanceField::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open SDF file " + path);
  std::string tag;
  int version = 0, cols = 0, rows = 0;
  double ox = 0, oy = 0, cs = 0;
  in >> tag >> version;
  if (tag != "steap-sdf" || version != 1) throw std::runtime_error("not an SDF grid file: " + path);
  in >> tag >> cols >> rows;
  if (tag != "size") throw std::runtime_error("SDF file: expected 'size'");
  in >> tag >> ox >> oy;
  if (tag != "origin") throw std::runtime_error("SDF file: expected 'origin'");
  in >> tag >> cs;
  if (tag != "cell_size") throw std::runtime_error("SDF file: expected 'cell_size'");
  std::vector<double> values(static_cast<std::size_t>(cols) * rows);
  for (double& v : values) {
    if (!(in >> v)) throw std::runtime_error("SDF file truncated: " + path);
  }
  return {cols, rows, {ox, oy}, cs, std::move(values)};
}

}  // namespace steap::env
