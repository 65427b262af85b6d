#include "steap/bench/bench.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "steap/runtime/rng.hpp"
#include "steap/runtime/runner.hpp"

namespace steap::bench {

using nlohmann::json;

void BenchConfig::validate() const {
  if (n_dyn.empty() || n_cam.empty()) throw std::invalid_argument("noise grids must be non-empty");
  if (seeds < 1) throw std::invalid_argument("seeds must be >= 1");
  if (modes.empty()) throw std::invalid_argument("at least one mode is required");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (world.obstacle_count < 0 || !(world.obstacle_width > 0.0) || !(world.obstacle_height > 0.0)) {
    throw std::invalid_argument("world template needs obstacle_count >= 0 and positive obstacle size");
  }
  for (double v : n_dyn) {
    if (!(v >= 0.0)) throw std::invalid_argument("n_dyn values must be >= 0");
  }
  for (double v : n_cam) {
    if (!(v >= 0.0)) throw std::invalid_argument("n_cam values must be >= 0");
  }
  sim.validate();
  problem.validate();
}

void from_json(const json& j, BenchConfig& c) {
  if (j.contains("problem")) runtime::from_json(j.at("problem"), c.problem);
  if (j.contains("sim")) runtime::from_json(j.at("sim"), c.sim);
  if (!j.contains("bench")) return;
  const json& b = j.at("bench");
  if (b.contains("world_template")) {
    const json& w = b.at("world_template");
    if (w.contains("extent")) {
      const auto e = w.at("extent").get<std::vector<double>>();
      if (e.size() != 2) throw std::invalid_argument("world_template.extent needs [width, height]");
      c.world.width = e[0];
      c.world.height = e[1];
    }
    c.world.cell_size = w.value("cell_size", c.world.cell_size);
    c.world.obstacle_count = w.value("obstacle_count", c.world.obstacle_count);
    if (w.contains("obstacle_size")) {
      const auto s = w.at("obstacle_size").get<std::vector<double>>();
      if (s.size() != 2) throw std::invalid_argument("world_template.obstacle_size needs [w, h]");
      c.world.obstacle_width = s[0];
      c.world.obstacle_height = s[1];
    }
    c.world.max_rejections = w.value("max_rejections", c.world.max_rejections);
  }
  c.n_dyn = b.value("n_dyn", c.n_dyn);
  c.n_cam = b.value("n_cam", c.n_cam);
  c.seeds = b.value("seeds", c.seeds);
  c.base_seed = b.value("base_seed", c.base_seed);
  if (b.contains("modes")) {
    c.modes.clear();
    for (const auto& m : b.at("modes")) c.modes.push_back(runtime::run_mode_from_string(m.get<std::string>()));
  }
  c.out = b.value("out", c.out);
  c.jobs = b.value("jobs", c.jobs);
}

void to_json(json& j, const BenchConfig& c) {
  std::vector<std::string> modes;
  for (RunMode m : c.modes) modes.emplace_back(runtime::to_string(m));
  j = {{"problem", c.problem},
       {"sim", c.sim},
       {"bench",
        {{"world_template",
          {{"extent", {c.world.width, c.world.height}},
           {"cell_size", c.world.cell_size},
           {"obstacle_count", c.world.obstacle_count},
           {"obstacle_size", {c.world.obstacle_width, c.world.obstacle_height}},
           {"max_rejections", c.world.max_rejections}}},
         {"n_dyn", c.n_dyn},
         {"n_cam", c.n_cam},
         {"seeds", c.seeds},
         {"base_seed", c.base_seed},
         {"modes", modes},
         {"out", c.out},
         {"jobs", c.jobs}}}};
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + " is not valid JSON: " + e.what());
  }
  BenchConfig c;
  try {
    c = j.get<BenchConfig>();
  } catch (const json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  return c;
}

env::WorldSpec generate_world(std::uint64_t seed, const WorldTemplate& tmpl, const ProblemSpec& spec) {
  env::WorldSpec w;
  w.width = tmpl.width;
  w.height = tmpl.height;
  w.cell_size = tmpl.cell_size;
  const double clearance = spec.body.max_reach() + spec.hinge.eps;
  const Eigen::Vector2d keep_out[] = {spec.start.base.translation(), spec.goal.base.translation()};
  const Eigen::Vector2d size(tmpl.obstacle_width, tmpl.obstacle_height);
  const Eigen::Vector2d lo = w.lower_corner() + 0.5 * size;
  const Eigen::Vector2d hi = w.upper_corner() - 0.5 * size;
  runtime::Rng rng = runtime::Rng::stream(seed, 0);
  int rejections = 0;
  while (static_cast<int>(w.obstacles.size()) < tmpl.obstacle_count) {
    env::Box b;
    b.size = size;
    b.center = {rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y())};
    bool ok = true;
    for (const auto& p : keep_out) ok = ok && b.distance_to(p) > clearance;
    if (ok) {
      w.obstacles.push_back(b);
    } else if (++rejections > tmpl.max_rejections) {
      throw WorldGenerationError("world too crowded: obstacle placement failed after " +
                                 std::to_string(tmpl.max_rejections) + " rejections");
    }
  }
  return w;
}

BenchResult run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<ProblemSpec> problems;
  for (int s = 0; s < cfg.seeds; ++s) {
    ProblemSpec p = cfg.problem;
    p.world = generate_world(cfg.base_seed + s, cfg.world, p);
    problems.push_back(std::move(p));
  }

  BenchResult out;
  for (int s = 0; s < cfg.seeds; ++s) {
    for (double nd : cfg.n_dyn) {
      for (double nc : cfg.n_cam) {
        for (RunMode m : cfg.modes) {
          RunRow r;
          r.mode = m;
          r.n_dyn = nd;
          r.n_cam = nc;
          r.seed_index = s;
          r.seed = cfg.base_seed + s;
          out.runs.push_back(r);
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.runs.size(); i = next++) {
      RunRow& r = out.runs[i];
      SimConfig sim = cfg.sim;
      sim.n_dyn = r.n_dyn;
      sim.n_cam = r.n_cam;
      sim.seed = r.seed;
      const ProblemSpec& spec = problems[r.seed_index];
      try {
        const runtime::RunRecord rec = runtime::run_mode(r.mode, spec, sim);
        r.metrics = runtime::compute_metrics(rec, spec);
        r.reason = rec.reason;
      } catch (const std::exception& e) {
        r.metrics = Metrics{};
        r.reason = std::string("error: ") + e.what();
      }
    }
  };
  const int threads = std::min<int>(cfg.jobs, static_cast<int>(out.runs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  out.rows = aggregate(out.runs);
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& runs) {
  struct Acc {
    AggregateRow row;
    double sums[6] = {};
    int counts[6] = {};
    double time = 0.0;
  };
  // Keyed on (n_dyn, n_cam, mode) so the result does not depend on run order.
  std::map<std::tuple<double, double, int>, Acc> groups;
  for (const RunRow& r : runs) {
    Acc& a = groups[{r.n_dyn, r.n_cam, static_cast<int>(r.mode)}];
    a.row.mode = r.mode;
    a.row.n_dyn = r.n_dyn;
    a.row.n_cam = r.n_cam;
    ++a.row.runs;
    a.time += r.metrics.mean_step_time;
    if (!r.metrics.success) continue;
    ++a.row.successes;
    const std::optional<double> vals[6] = {r.metrics.goal_err_trans, r.metrics.goal_err_rot,
                                           r.metrics.est_err_trans,  r.metrics.est_err_rot,
                                           r.metrics.meas_err_trans, r.metrics.meas_err_rot};
    for (int k = 0; k < 6; ++k) {
      if (vals[k]) {
        a.sums[k] += *vals[k];
        ++a.counts[k];
      }
    }
  }
  std::vector<AggregateRow> rows;
  for (auto& [key, a] : groups) {
    AggregateRow row = a.row;
    row.success_rate = static_cast<double>(row.successes) / row.runs;
    std::optional<double>* dst[6] = {&row.goal_err_trans, &row.goal_err_rot, &row.est_err_trans,
                                     &row.est_err_rot,    &row.meas_err_trans, &row.meas_err_rot};
    for (int k = 0; k < 6; ++k) {
      if (a.counts[k] > 0) *dst[k] = a.sums[k] / a.counts[k];
    }
    row.mean_step_time = a.time / row.runs;
    rows.push_back(row);
  }
  return rows;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "mode,n_dyn,n_cam,runs,successes,success_rate,goal_err_trans,goal_err_rot,est_err_trans,est_err_rot,"
        "meas_err_trans,meas_err_rot\n";
  for (const auto& r : rows) {
    os << runtime::to_string(r.mode) << ',' << format_number(r.n_dyn) << ',' << format_number(r.n_cam) << ','
       << r.runs << ',' << r.successes << ',' << format_number(r.success_rate) << ',' << opt(r.goal_err_trans)
       << ',' << opt(r.goal_err_rot) << ',' << opt(r.est_err_trans) << ',' << opt(r.est_err_rot) << ','
       << opt(r.meas_err_trans) << ',' << opt(r.meas_err_rot) << '\n';
  }
  return os.str();
}

std::string runs_csv(const std::vector<RunRow>& runs) {
  std::ostringstream os;
  os << "mode,n_dyn,n_cam,seed,success,goal_err_trans,goal_err_rot,est_err_trans,est_err_rot,meas_err_trans,"
        "meas_err_rot,reason\n";
  for (const auto& r : runs) {
    const Metrics& m = r.metrics;
    std::string reason = r.reason;
    for (char& c : reason) {
      if (c == ',' || c == '\n' || c == '"') c = ';';
    }
    os << runtime::to_string(r.mode) << ',' << format_number(r.n_dyn) << ',' << format_number(r.n_cam) << ','
       << r.seed << ',' << (m.success ? 1 : 0) << ',' << format_number(m.goal_err_trans) << ','
       << format_number(m.goal_err_rot) << ',' << opt(m.est_err_trans) << ',' << opt(m.est_err_rot) << ','
       << opt(m.meas_err_trans) << ',' << opt(m.meas_err_rot) << ',' << reason << '\n';
  }
  return os.str();
}

std::string timing_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "mode,n_dyn,n_cam,mean_step_time_s\n";
  for (const auto& r : rows) {
    os << runtime::to_string(r.mode) << ',' << format_number(r.n_dyn) << ',' << format_number(r.n_cam) << ','
       << format_number(r.mean_step_time) << '\n';
  }
  return os.str();
}

void write_csvs(const BenchResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, std::string> files[] = {{"aggregate.csv", aggregate_csv(result.rows)},
                                                       {"runs.csv", runs_csv(result.runs)},
                                                       {"timing.csv", timing_csv(result.rows)}};
  for (const auto& [name, text] : files) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path);
    if (!out || !(out << text)) throw std::runtime_error("cannot write " + path.string());
  }
}

}  // namespace steap::bench
