#include <cstdio>
#include <fstream>
#include <sstream>

#include "steap/bench/bench.hpp"

namespace steap::bench {

namespace {

constexpr double kScale = 30.0;  // px per m
constexpr double kMargin = 10.0;

struct Frame {
  Eigen::Vector2d lo, hi;
  double px(double x) const { return kMargin + (x - lo.x()) * kScale; }
  double py(double y) const { return kMargin + (hi.y() - y) * kScale; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void polyline(std::ostream& os, const Frame& f, const std::vector<MarkovState>& states, std::size_t first,
              const char* color, const char* id) {
  os << "  <polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
  for (std::size_t k = first; k < states.size(); ++k) {
    if (k > first) os << ' ';
    os << num(f.px(states[k].config.base.x())) << ',' << num(f.py(states[k].config.base.y()));
  }
  os << "\"/>\n";
}

}  // namespace

std::string render_svg(const runtime::RunRecord& rec, int snapshot) {
  const Frame f{rec.world.lower_corner(), rec.world.upper_corner()};
  const double w = rec.world.width * kScale + 2 * kMargin;
  const double h = rec.world.height * kScale + 2 * kMargin;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  os << "  <rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(w - 2 * kMargin)
     << "\" height=\"" << num(h - 2 * kMargin) << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& b : rec.world.obstacles) {
    os << "  <rect class=\"obstacle\" x=\"" << num(f.px(b.center.x() - 0.5 * b.size.x())) << "\" y=\""
       << num(f.py(b.center.y() + 0.5 * b.size.y())) << "\" width=\"" << num(b.size.x() * kScale)
       << "\" height=\"" << num(b.size.y() * kScale) << "\" fill=\"#555555\"/>\n";
  }
  polyline(os, f, rec.ground_truth.states, 0, "green", "ground_truth");
  if (!rec.estimated.empty()) polyline(os, f, rec.estimated.states, 0, "red", "estimated");
  if (!rec.planned_per_step.empty()) {
    const int n = static_cast<int>(rec.planned_per_step.size());
    const int k = snapshot < 0 ? n / 2 : std::min(snapshot, n - 1);
    polyline(os, f, rec.planned_per_step[k].states, k, "blue", "planned");
  }
  os << "  <circle id=\"goal\" cx=\"" << num(f.px(rec.goal.base.x())) << "\" cy=\"" << num(f.py(rec.goal.base.y()))
     << "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  os << "</svg>\n";
  return os.str();
}

void plot_run(const runtime::RunRecord& record, const std::string& path, int snapshot) {
  std::ofstream out(path);
  if (!out || !(out << render_svg(record, snapshot))) throw std::runtime_error("cannot write " + path);
}

}  // namespace steap::bench
