#include "steap/runtime/problem.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace steap {

using nlohmann::json;

void to_json(json& j, const MobileConfig& c) {
  j = {{"pose", {c.base.x(), c.base.y(), c.base.yaw()}},
       {"arm", std::vector<double>(c.arm.data(), c.arm.data() + c.arm.size())}};
}

void from_json(const json& j, MobileConfig& c) {
  const auto pose = j.at("pose").get<std::vector<double>>();
  if (pose.size() != 3) throw std::invalid_argument("pose needs [x, y, yaw]");
  const auto arm = j.value("arm", std::vector<double>{});
  c = MobileConfig(Se2Pose(pose[0], pose[1], pose[2]), Eigen::Map<const Vector>(arm.data(), arm.size()));
}

}  // namespace steap

namespace steap::runtime {

using nlohmann::json;

ProblemSpec ProblemSpec::benchmark_default() {
  ProblemSpec p;
  Vector tucked(2);
  tucked << 0.0, 2.6;
  const double heading = std::atan2(14.0, 24.0);
  p.start = MobileConfig(Se2Pose(-12.0, -7.0, heading), tucked);
  p.goal = MobileConfig(Se2Pose(12.0, 7.0, heading), tucked);
  p.gp = gp::GpParams::diagonal(3, 2, 0.03, 0.03);
  p.solver.relative_tolerance = 1e-10;
  p.gp.dt_default = p.dt();
  return p;
}

std::vector<double> ProblemSpec::support_times() const {
  std::vector<double> t(intervals + 1);
  for (int i = 0; i <= intervals; ++i) t[i] = total_time * i / intervals;
  return t;
}

void ProblemSpec::validate() const {
  if (intervals < 1) throw std::invalid_argument("need at least one interval (two support states)");
  if (!(total_time > 0.0)) throw std::invalid_argument("total_time must be positive");
  if (!start.compatible(goal)) throw DimensionError("start and goal configurations differ in shape");
  if (!start.has_base || start.arm_dim() != body.arm_dof()) {
    throw DimensionError("start/goal do not match the body model's arm");
  }
  world.validate();
  body.validate();
  gp.validate();
  if (gp.qc.rows() != start.tangent_dim()) throw DimensionError("Q_C size must equal 3 + arm joints");
  hinge.validate();
  if (!(sigma_fix > 0.0) || !(sigma_meas_floor > 0.0)) {
    throw std::invalid_argument("sigma_fix and sigma_meas_floor must be positive");
  }
  if (interp_per_interval < 0 || check_resolution < 1 || relinearize_passes < 0) {
    throw std::invalid_argument("interp_per_interval >= 0, check_resolution >= 1, relinearize_passes >= 0");
  }
  if (!(relinearize_threshold >= 0.0)) throw std::invalid_argument("relinearize_threshold must be >= 0");
}

void SimConfig::validate() const {
  if (!(n_dyn >= 0.0) || !(n_cam >= 0.0)) throw std::invalid_argument("noise levels must be >= 0");
  if (exec_substeps < 1) throw std::invalid_argument("exec_substeps must be >= 1");
  if (!(rot_noise_scale >= 0.0)) throw std::invalid_argument("rot_noise_scale must be >= 0");
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::OL: return "OL";
    case RunMode::SLAP: return "SLAP";
    case RunMode::STEAP: return "STEAP";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "OL" || name == "ol") return RunMode::OL;
  if (name == "SLAP" || name == "slap") return RunMode::SLAP;
  if (name == "STEAP" || name == "steap") return RunMode::STEAP;
  throw std::invalid_argument("unknown mode '" + name + "' (expected OL, SLAP or STEAP)");
}

namespace {

json state_row(const MarkovState& s) {
  std::vector<double> row{s.config.base.x(), s.config.base.y(), s.config.base.yaw()};
  row.insert(row.end(), s.config.arm.data(), s.config.arm.data() + s.config.arm.size());
  row.insert(row.end(), s.velocity.data(), s.velocity.data() + s.velocity.size());
  return row;
}

MarkovState state_from_row(const json& j) {
  const auto row = j.get<std::vector<double>>();
  if (row.size() < 6 || row.size() % 2 != 0) throw std::invalid_argument("bad state row in record");
  const int dof = static_cast<int>(row.size()) / 2;
  const int arm = dof - 3;
  return MarkovState(MobileConfig(Se2Pose(row[0], row[1], row[2]), Eigen::Map<const Vector>(row.data() + 3, arm)),
                     Eigen::Map<const Vector>(row.data() + dof, dof));
}

json trajectory_json(const Trajectory& t) {
  json rows = json::array();
  for (const auto& s : t.states) rows.push_back(state_row(s));
  return {{"times", t.times}, {"states", rows}};
}

Trajectory trajectory_from(const json& j) {
  Trajectory t;
  t.times = j.at("times").get<std::vector<double>>();
  for (const auto& row : j.at("states")) t.states.push_back(state_from_row(row));
  return t;
}

json body_json(const env::BodyModel& b) {
  json spheres = json::array();
  for (const auto& s : b.spheres) {
    spheres.push_back({{"link", s.link}, {"offset", {s.offset.x(), s.offset.y()}}, {"radius", s.radius}});
  }
  return {{"base_size", {b.base_size.x(), b.base_size.y()}}, {"link_lengths", b.link_lengths}, {"spheres", spheres}};
}

void body_from_json(const json& j, env::BodyModel& b) {
  if (j.contains("base_size")) {
    const auto s = j.at("base_size").get<std::vector<double>>();
    b.base_size = {s.at(0), s.at(1)};
  }
  if (j.contains("link_lengths")) b.link_lengths = j.at("link_lengths").get<std::vector<double>>();
  if (j.contains("spheres")) {
    b.spheres.clear();
    for (const auto& s : j.at("spheres")) {
      const auto off = s.at("offset").get<std::vector<double>>();
      b.spheres.push_back({s.at("link").get<int>(), {off.at(0), off.at(1)}, s.at("radius").get<double>()});
    }
  }
}

}  // namespace

void to_json(json& j, const ProblemSpec& p) {
  std::vector<std::vector<double>> qc(p.gp.qc.rows());
  for (int r = 0; r < p.gp.qc.rows(); ++r) {
    for (int c = 0; c < p.gp.qc.cols(); ++c) qc[r].push_back(p.gp.qc(r, c));
  }
  j = {{"start", p.start},
       {"goal", p.goal},
       {"intervals", p.intervals},
       {"total_time", p.total_time},
       {"world", p.world},
       {"body", body_json(p.body)},
       {"qc", qc},
       {"eps", p.hinge.eps},
       {"sigma_obs", p.hinge.sigma_obs},
       {"sigma_fix", p.sigma_fix},
       {"sigma_meas_floor", p.sigma_meas_floor},
       {"interp_per_interval", p.interp_per_interval},
       {"check_resolution", p.check_resolution},
       {"relinearize_threshold", p.relinearize_threshold},
       {"relinearize_passes", p.relinearize_passes},
       {"ordering", to_string(p.ordering)},
       {"solver",
        {{"kind", p.solver.kind == SolverKind::GaussNewton ? "gauss-newton" : "levenberg-marquardt"},
         {"initial_lambda", p.solver.initial_lambda},
         {"relative_tolerance", p.solver.relative_tolerance},
         {"absolute_tolerance", p.solver.absolute_tolerance},
         {"max_iterations", p.solver.max_iterations}}}};
}

void from_json(const json& j, ProblemSpec& p) {
  if (j.contains("start")) p.start = j.at("start").get<MobileConfig>();
  if (j.contains("goal")) p.goal = j.at("goal").get<MobileConfig>();
  p.intervals = j.value("intervals", p.intervals);
  p.total_time = j.value("total_time", p.total_time);
  if (j.contains("world")) p.world = j.at("world").get<env::WorldSpec>();
  if (j.contains("body")) body_from_json(j.at("body"), p.body);
  if (j.contains("qc")) {
    const auto rows = j.at("qc").get<std::vector<std::vector<double>>>();
    p.gp.qc = Matrix::Zero(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.size()) throw std::invalid_argument("qc must be a square matrix");
      for (std::size_t c = 0; c < rows.size(); ++c) p.gp.qc(r, c) = rows[r][c];
    }
  }
  if (j.contains("qc_base") || j.contains("qc_arm")) {
    const int arm = p.start.arm_dim();
    const double base_now = p.gp.qc.rows() > 0 ? p.gp.qc(0, 0) : 1.0;
    const double arm_now = arm > 0 && p.gp.qc.rows() > 3 ? p.gp.qc(3, 3) : base_now;
    p.gp = gp::GpParams::diagonal(3, arm, j.value("qc_base", base_now), j.value("qc_arm", arm_now));
  }
  p.hinge.eps = j.value("eps", p.hinge.eps);
  p.hinge.sigma_obs = j.value("sigma_obs", p.hinge.sigma_obs);
  p.sigma_fix = j.value("sigma_fix", p.sigma_fix);
  p.sigma_meas_floor = j.value("sigma_meas_floor", p.sigma_meas_floor);
  p.interp_per_interval = j.value("interp_per_interval", p.interp_per_interval);
  p.check_resolution = j.value("check_resolution", p.check_resolution);
  p.relinearize_threshold = j.value("relinearize_threshold", p.relinearize_threshold);
  p.relinearize_passes = j.value("relinearize_passes", p.relinearize_passes);
  if (j.contains("ordering")) p.ordering = ordering_mode_from_string(j.at("ordering").get<std::string>());
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("kind")) {
      const auto kind = s.at("kind").get<std::string>();
      if (kind == "gauss-newton") {
        p.solver.kind = SolverKind::GaussNewton;
      } else if (kind == "levenberg-marquardt") {
        p.solver.kind = SolverKind::LevenbergMarquardt;
      } else {
        throw std::invalid_argument("unknown solver kind '" + kind + "'");
      }
    }
    p.solver.initial_lambda = s.value("initial_lambda", p.solver.initial_lambda);
    p.solver.relative_tolerance = s.value("relative_tolerance", p.solver.relative_tolerance);
    p.solver.absolute_tolerance = s.value("absolute_tolerance", p.solver.absolute_tolerance);
    p.solver.max_iterations = s.value("max_iterations", p.solver.max_iterations);
  }
  p.solver.ordering = p.ordering;
  p.gp.dt_default = p.dt();
}

void to_json(json& j, const SimConfig& s) {
  j = {{"n_dyn", s.n_dyn},
       {"n_cam", s.n_cam},
       {"seed", s.seed},
       {"exec_substeps", s.exec_substeps},
       {"rot_noise_scale", s.rot_noise_scale}};
}

void from_json(const json& j, SimConfig& s) {
  s.n_dyn = j.value("n_dyn", s.n_dyn);
  s.n_cam = j.value("n_cam", s.n_cam);
  s.seed = j.value("seed", s.seed);
  s.exec_substeps = j.value("exec_substeps", s.exec_substeps);
  s.rot_noise_scale = j.value("rot_noise_scale", s.rot_noise_scale);
}

void to_json(json& j, const RunRecord& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    json e = {{"index", s.index},
              {"truth", state_row(s.truth)},
              {"plan_hash", s.plan_hash},
              {"time_s", s.time_s},
              {"reeliminated", s.reeliminated}};
    e["measurement"] = s.measurement ? json(*s.measurement) : json(nullptr);
    e["estimate"] = s.estimate ? state_row(*s.estimate) : json(nullptr);
    steps.push_back(std::move(e));
  }
  json plans = json::array();
  for (const auto& p : r.planned_per_step) plans.push_back(trajectory_json(p));
  json trace = json::array();
  for (const auto& c : r.substep_trace) trace.push_back(c);
  j = {{"mode", to_string(r.mode)},
       {"seed", r.seed},
       {"world", r.world},
       {"goal", r.goal},
       {"success", r.success},
       {"reason", r.reason},
       {"times", r.times},
       {"initial_plan_time_s", r.initial_plan_time_s},
       {"ground_truth", trajectory_json(r.ground_truth)},
       {"estimated", trajectory_json(r.estimated)},
       {"planned_per_step", plans},
       {"steps", steps},
       {"substep_trace", trace}};
}

void from_json(const json& j, RunRecord& r) {
  r.mode = run_mode_from_string(j.at("mode").get<std::string>());
  r.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("world")) r.world = j.at("world").get<env::WorldSpec>();
  if (j.contains("goal")) r.goal = j.at("goal").get<MobileConfig>();
  r.success = j.at("success").get<bool>();
  r.reason = j.value("reason", std::string());
  r.times = j.at("times").get<std::vector<double>>();
  r.initial_plan_time_s = j.value("initial_plan_time_s", 0.0);
  r.ground_truth = trajectory_from(j.at("ground_truth"));
  r.estimated = trajectory_from(j.at("estimated"));
  r.planned_per_step.clear();
  for (const auto& p : j.at("planned_per_step")) r.planned_per_step.push_back(trajectory_from(p));
  r.steps.clear();
  for (const auto& e : j.at("steps")) {
    StepRecord s;
    s.index = e.at("index").get<int>();
    s.truth = state_from_row(e.at("truth"));
    if (!e.at("measurement").is_null()) s.measurement = e.at("measurement").get<MobileConfig>();
    if (!e.at("estimate").is_null()) s.estimate = state_from_row(e.at("estimate"));
    s.plan_hash = e.at("plan_hash").get<std::uint64_t>();
    s.time_s = e.at("time_s").get<double>();
    s.reeliminated = e.at("reeliminated").get<std::size_t>();
    r.steps.push_back(std::move(s));
  }
  r.substep_trace.clear();
  for (const auto& c : j.value("substep_trace", json::array())) r.substep_trace.push_back(c.get<MobileConfig>());
}

void to_json(json& j, const Metrics& m) {
  j = {{"success", m.success},
       {"goal_err_trans", m.goal_err_trans},
       {"goal_err_rot", m.goal_err_rot},
       {"mean_step_time", m.mean_step_time}};
  auto put = [&](const char* k, const std::optional<double>& v) { j[k] = v ? json(*v) : json(nullptr); };
  put("est_err_trans", m.est_err_trans);
  put("est_err_rot", m.est_err_rot);
  put("meas_err_trans", m.meas_err_trans);
  put("meas_err_rot", m.meas_err_rot);
}

void save_record(const RunRecord& record, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run record " + path);
  out << json(record).dump(1) << '\n';
}

RunRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open run record " + path);
  return json::parse(in).get<RunRecord>();
}

std::uint64_t trajectory_hash(const Trajectory& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& s : t.states) {
    mix(s.config.base.x());
    mix(s.config.base.y());
    mix(s.config.base.yaw());
    for (int i = 0; i < s.config.arm.size(); ++i) mix(s.config.arm[i]);
    for (int i = 0; i < s.velocity.size(); ++i) mix(s.velocity[i]);
  }
  return h;
}

}  // namespace steap::runtime
