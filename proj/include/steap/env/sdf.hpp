#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "steap/env/world.hpp"

namespace steap::env {

/// Distance reported everywhere when the grid holds no occupied (or no free) node.
inline constexpr double kUnboundedDistance = 1.0e3;

/// Boolean node grid, row-major with rows along y.
struct OccupancyGrid {
  int cols = 0;
  int rows = 0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double cell_size = 1.0;
  std::vector<unsigned char> occupied;

  bool at(int col, int row) const { return occupied[static_cast<std::size_t>(row) * cols + col] != 0; }
};

/// Rasterizes the world: node (c, r) sits at origin + cell_size * (c, r) and is
/// occupied when it falls inside (or on the border of) any obstacle box.
OccupancyGrid rasterize(const WorldSpec& world);

/// Exact squared Euclidean distance (in cell units) from every node to the
/// nearest node with `target == true`; lower-envelope-of-parabolas transform.
std::vector<double> squared_distance_transform(const std::vector<unsigned char>& target, int cols,
                                               int rows);

struct SdfSample {
  double distance = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  bool clamped = false;
};

class SignedDistanceField {
 public:
  SignedDistanceField() = default;
  SignedDistanceField(int cols, int rows, Eigen::Vector2d origin, double cell_size,
                      std::vector<double> values);

  static SignedDistanceField from_occupancy(const OccupancyGrid& grid);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  const Eigen::Vector2d& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  const std::vector<double>& values() const { return values_; }
  double at(int col, int row) const { return values_[static_cast<std::size_t>(row) * cols_ + col]; }

  /// Bilinear distance with the analytic gradient of the interpolant. On a
  /// cell border the gradient component across it is the mean of both sides.
  SdfSample query(const Eigen::Vector2d& point) const;
  double distance(const Eigen::Vector2d& point) const { return query(point).distance; }

  /// Text grid: header lines then one row of values per line (row 0 first).
  void save(const std::string& path) const;
  static SignedDistanceField load(const std::string& path);

 private:
  int cols_ = 0;
  int rows_ = 0;
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  double cell_size_ = 1.0;
  std::vector<double> values_;
};

SignedDistanceField build_sdf(const WorldSpec& world);

}  // namespace steap::env
