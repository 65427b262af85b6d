#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace steap::env {

struct Box {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d size = Eigen::Vector2d::Ones();

  bool contains(const Eigen::Vector2d& p, double tol = 1e-9) const;
  /// Distance from p to the closest point of the box (0 inside).
  double distance_to(const Eigen::Vector2d& p) const;
};

/// Rectangular world [-w/2, w/2] x [-h/2, h/2] populated with axis-aligned boxes.
struct WorldSpec {
  double width = 30.0;
  double height = 20.0;
  double cell_size = 0.1;
  std::vector<Box> obstacles;

  Eigen::Vector2d lower_corner() const { return {-0.5 * width, -0.5 * height}; }
  Eigen::Vector2d upper_corner() const { return {0.5 * width, 0.5 * height}; }
  /// Throws std::invalid_argument on a zero-area world, bad cell size, or out-of-extent boxes.
  void validate() const;
};

void to_json(nlohmann::json& j, const Box& b);
void from_json(const nlohmann::json& j, Box& b);
void to_json(nlohmann::json& j, const WorldSpec& w);
void from_json(const nlohmann::json& j, WorldSpec& w);

WorldSpec load_world(const std::string& path);
void save_world(const WorldSpec& world, const std::string& path);

}  // namespace steap::env
