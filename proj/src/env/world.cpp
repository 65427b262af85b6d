#include "steap/env/world.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace steap::env {

bool Box::contains(const Eigen::Vector2d& p, double tol) const {
  const Eigen::Vector2d rel = (p - center).cwiseAbs();
  return rel.x() <= 0.5 * size.x() + tol && rel.y() <= 0.5 * size.y() + tol;
}

double Box::distance_to(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d excess = ((p - center).cwiseAbs() - 0.5 * size).cwiseMax(0.0);
  return excess.norm();
}

void WorldSpec::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("world must have positive area");
  }
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
  const Eigen::Vector2d lo = lower_corner(), hi = upper_corner();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Box& b = obstacles[i];
    const Eigen::Vector2d bmin = b.center - 0.5 * b.size, bmax = b.center + 0.5 * b.size;
    if ((b.size.array() <= 0.0).any() || (bmin.array() < lo.array() - 1e-9).any() ||
        (bmax.array() > hi.array() + 1e-9).any()) {
      throw std::invalid_argument("obstacle " + std::to_string(i) + " lies outside the world");
    }
  }
}

void to_json(nlohmann::json& j, const Box& b) {
  j = {{"center", {b.center.x(), b.center.y()}}, {"size", {b.size.x(), b.size.y()}}};
}

void from_json(const nlohmann::json& j, Box& b) {
  const auto c = j.at("center").get<std::vector<double>>();
  const auto s = j.at("size").get<std::vector<double>>();
  if (c.size() != 2 || s.size() != 2) throw std::invalid_argument("box center/size need 2 entries");
  b.center = {c[0], c[1]};
  b.size = {s[0], s[1]};
}

void to_json(nlohmann::json& j, const WorldSpec& w) {
  j = {{"extent", {w.width, w.height}}, {"cell_size", w.cell_size}, {"obstacles", w.obstacles}};
}

void from_json(const nlohmann::json& j, WorldSpec& w) {
  const auto extent = j.at("extent").get<std::vector<double>>();
  if (extent.size() != 2) throw std::invalid_argument("extent needs [width, height]");
  w.width = extent[0];
  w.height = extent[1];
  w.cell_size = j.value("cell_size", 0.1);
  w.obstacles = j.value("obstacles", std::vector<Box>{});
}

WorldSpec load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path);
  WorldSpec w = nlohmann::json::parse(in).get<WorldSpec>();
  w.validate();
  return w;
}

void save_world(const WorldSpec& world, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file " + path);
  out << nlohmann::json(world).dump(2) << '\n';
}

}  // namespace steap::env
