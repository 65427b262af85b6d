#include "steap/runtime/runner.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "steap/env/sdf.hpp"
#include "steap/inference/optimizer.hpp"

namespace steap::runtime {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Matrix fix_covariance(const ProblemSpec& spec) {
  const int n = 2 * spec.start.tangent_dim();
  return Matrix::Identity(n, n) * spec.sigma_fix * spec.sigma_fix;
}

void check_endpoints(const ProblemSpec& spec, const ObstacleModel& model) {
  const MobileConfig ends[] = {spec.start, spec.goal};
  if (!env::collision_free(ends, *model.body, *model.sdf)) {
    throw std::invalid_argument("start or goal configuration is in collision");
  }
}

/// Shared closed-loop bookkeeping for the three modes.
struct Episode {
  const ProblemSpec& spec;
  const SimConfig& sim;
  std::shared_ptr<const ObstacleModel> model;
  RunRecord rec;
  Rng dyn;
  Rng cam;

  Episode(const ProblemSpec& s, const SimConfig& c, RunMode mode)
      : spec(s), sim(c), dyn(Rng::stream(c.seed, kDynamicsStream)), cam(Rng::stream(c.seed, kMeasurementStream)) {
    spec.validate();
    sim.validate();
    model = make_obstacle_model(spec);
    check_endpoints(spec, *model);
    rec.mode = mode;
    rec.seed = sim.seed;
    rec.world = spec.world;
    rec.goal = spec.goal;
    rec.times = spec.support_times();
    rec.ground_truth.times = {rec.times[0]};
    rec.ground_truth.states = {MarkovState::at_rest(spec.start)};
    rec.substep_trace = {spec.start};
  }

  const MarkovState& truth() const { return rec.ground_truth.states.back(); }

  void fail(std::string reason) {
    rec.success = false;
    rec.reason = std::move(reason);
  }

  /// Gate on the planned segment, then execute it. Returns false (and records the
  /// reason) on a planned or executed collision.
  bool advance(int i, const Trajectory& plan, StepRecord& step) {
    step.index = i;
    step.plan_hash = trajectory_hash(plan);
    rec.planned_per_step.push_back(plan);
    const MarkovState& a = plan.states[i];
    const MarkovState& b = plan.states[i + 1];
    if (!env::collision_free(a, b, spec.dt(), spec.gp.qc, spec.check_resolution, *model->body, *model->sdf)) {
      fail("planned segment " + std::to_string(i) + " in collision");
      return false;
    }
    ExecutionResult ex = simulate_execute(truth(), a, b, spec.dt(), spec.gp.qc, sim, dyn);
    rec.substep_trace.insert(rec.substep_trace.end(), ex.trace.begin() + 1, ex.trace.end());
    rec.ground_truth.times.push_back(rec.times[i + 1]);
    rec.ground_truth.states.push_back(ex.next);
    step.truth = ex.next;
    if (!env::collision_free(ex.trace, *model->body, *model->sdf)) {
      fail("executed segment " + std::to_string(i) + " in collision");
      return false;
    }
    return true;
  }
};

std::shared_ptr<const Factor> gp_factor(const ProblemSpec& spec, Key a, Key b) {
  return std::make_shared<GpPriorFactor>(a, b, spec.dt(), spec.gp.qc);
}

void add_obstacle_factors(FactorGraph& g, const ProblemSpec& spec,
                          const std::shared_ptr<const ObstacleModel>& model, Key first, Key last) {
  for (Key k = first; k <= last; ++k) g.add(std::make_shared<ObstacleFactor>(k, model));
  const int m = spec.interp_per_interval;
  for (Key k = first; k < last; ++k) {
    for (int j = 1; j <= m; ++j) {
      const double tau = spec.dt() * j / (m + 1);
      g.add(std::make_shared<InterpObstacleFactor>(k, k + 1, spec.dt(), tau, spec.gp.qc, model));
    }
  }
}

/// Truncated future graph for SLAP: states first..N anchored at `anchor`.
FactorGraph future_graph(const ProblemSpec& spec, const std::shared_ptr<const ObstacleModel>& model,
                         const Trajectory& plan, Key first, const MarkovState& anchor, const Matrix& anchor_cov) {
  const Key last = spec.intervals;
  FactorGraph g;
  for (Key k = first; k <= last; ++k) g.values[k] = plan.states[k];
  g.values[first] = anchor;
  for (Key k = first; k < last; ++k) g.add(gp_factor(spec, k, k + 1));
  g.add(std::make_shared<FixFactor>(FactorKind::StartFix, first, anchor, anchor_cov));
  g.add(std::make_shared<FixFactor>(FactorKind::GoalFix, last, MarkovState::at_rest(spec.goal), fix_covariance(spec)));
  add_obstacle_factors(g, spec, model, first, last);
  return g;
}

std::shared_ptr<const Factor> measurement_factor(Key key, const Measurement& z) {
  return std::make_shared<MeasurementFactor>(key, z.mean, z.covariance);
}

}  // namespace

std::shared_ptr<const ObstacleModel> make_obstacle_model(const ProblemSpec& spec) {
  auto m = std::make_shared<ObstacleModel>();
  m->sdf = std::make_shared<const env::SignedDistanceField>(env::build_sdf(spec.world));
  m->body = std::make_shared<const env::BodyModel>(spec.body);
  m->hinge = spec.hinge;
  return m;
}

Trajectory initialize_trajectory(const ProblemSpec& spec) {
  Trajectory t;
  t.times = spec.support_times();
  const Vector xi = local_coordinates(spec.start, spec.goal);
  const Vector v = xi / spec.total_time;
  for (int i = 0; i <= spec.intervals; ++i) {
    const double s = static_cast<double>(i) / spec.intervals;
    const bool end = i == 0 || i == spec.intervals;
    t.states.emplace_back(retract(spec.start, s * xi), end ? Vector(Vector::Zero(v.size())) : v);
  }
  return t;
}

FactorGraph build_steap_graph(const ProblemSpec& spec, std::shared_ptr<const ObstacleModel> model) {
  if (!model) model = make_obstacle_model(spec);
  const Key n = spec.intervals;
  FactorGraph g;
  g.values = trajectory_values(initialize_trajectory(spec));
  for (Key k = 0; k < n; ++k) g.add(gp_factor(spec, k, k + 1));
  g.add(std::make_shared<FixFactor>(FactorKind::StartFix, 0, MarkovState::at_rest(spec.start), fix_covariance(spec)));
  g.add(std::make_shared<FixFactor>(FactorKind::GoalFix, n, MarkovState::at_rest(spec.goal), fix_covariance(spec)));
  add_obstacle_factors(g, spec, model, 0, n);
  return g;
}

ExecutionResult simulate_execute(const MarkovState& current, const MarkovState& plan_i,
                                 const MarkovState& plan_next, double dt, const Matrix& qc,
                                 const SimConfig& sim, Rng& rng) {
  const int s = sim.exec_substeps;
  const double h = dt / s;
  const std::vector<MobileConfig> cmd = env::upsample_segment(plan_i, plan_next, dt, qc, s);
  const int dim = current.dof();
  const int trans = current.config.has_base ? 2 : 0;

  ExecutionResult out;
  out.trace.reserve(s + 1);
  out.trace.push_back(current.config);
  MobileConfig x = current.config;
  Vector noise = Vector::Zero(dim);
  for (int j = 0; j < s; ++j) {
    for (int c = 0; c < dim; ++c) {
      const double bound = c < trans ? sim.n_dyn : sim.n_dyn * sim.rot_noise_scale;
      noise[c] = rng.uniform(-bound, bound);
    }
    x = retract(x, local_coordinates(cmd[j], cmd[j + 1]) + h * noise);
    out.trace.push_back(x);
  }
  out.next = MarkovState(x, plan_next.velocity + noise);
  return out;
}

Measurement simulate_measurement(const MobileConfig& truth, double n_cam, double sigma_floor, Rng& rng) {
  const int dim = truth.tangent_dim();
  Vector e(dim);
  for (int c = 0; c < dim; ++c) e[c] = n_cam * rng.normal();
  const double sigma = std::max(n_cam, sigma_floor);
  return {n_cam > 0.0 ? retract(truth, e) : truth, Matrix::Identity(dim, dim) * sigma * sigma};
}

RunRecord steap_run(const ProblemSpec& spec, const SimConfig& sim, const StepHook& hook) {
  Episode ep(spec, sim, RunMode::STEAP);
  const int n = spec.intervals;
  try {
    auto t0 = Clock::now();
    FactorGraph g = build_steap_graph(spec, ep.model);
    g.values = optimize_batch(g, spec.solver);
    IsamParams ip;
    ip.relinearize_threshold = spec.relinearize_threshold;
    ip.ordering = spec.ordering;
    Isam isam(ip);
    const UpdateStats first = isam.update(g.factors, g.values);
    // GoalFix is the second factor after the N GP priors and the StartFix.
    const std::size_t goal_slot = first.new_factor_slots.at(n + 1);
    ep.rec.initial_plan_time_s = seconds_since(t0);

    for (int i = 0; i < n; ++i) {
      StepRecord step;
      // The first segment follows the batch plan the tree was built from.
      const Trajectory plan = values_trajectory(i == 0 ? g.values : isam.estimate(), ep.rec.times);
      if (!ep.advance(i, plan, step)) {
        ep.rec.steps.push_back(std::move(step));
        break;
      }
      const Measurement z = simulate_measurement(step.truth.config, sim.n_cam, spec.sigma_meas_floor, ep.cam);
      step.measurement = z.mean;

      t0 = Clock::now();
      std::vector<std::size_t> remove;
      if (i + 1 == n) remove.push_back(goal_slot);
      const UpdateStats st = isam.update({measurement_factor(i + 1, z)}, {}, remove);
      isam.converge(spec.relinearize_passes, spec.solver.absolute_tolerance);
      step.time_s = seconds_since(t0);
      step.reeliminated = st.reeliminated;
      step.estimate = isam.estimate().at(i + 1);
      ep.rec.steps.push_back(std::move(step));
      if (hook) hook(i + 1, isam);
    }
    if (ep.rec.reason.empty()) ep.rec.success = true;
    const Values est = isam.estimate();
    ep.rec.estimated.times = ep.rec.ground_truth.times;
    for (std::size_t k = 0; k < ep.rec.ground_truth.size(); ++k) ep.rec.estimated.states.push_back(est.at(k));
  } catch (const std::exception& e) {
    ep.fail(std::string("solver failure: ") + e.what());
  }
  return ep.rec;
}

RunRecord ol_run(const ProblemSpec& spec, const SimConfig& sim) {
  Episode ep(spec, sim, RunMode::OL);
  try {
    const auto t0 = Clock::now();
    const FactorGraph g = build_steap_graph(spec, ep.model);
    const Trajectory plan = values_trajectory(optimize_batch(g, spec.solver), ep.rec.times);
    ep.rec.initial_plan_time_s = seconds_since(t0);
    for (int i = 0; i < spec.intervals; ++i) {
      StepRecord step;
      const bool ok = ep.advance(i, plan, step);
      ep.rec.steps.push_back(std::move(step));
      if (!ok) break;
    }
    if (ep.rec.reason.empty()) ep.rec.success = true;
  } catch (const std::exception& e) {
    ep.fail(std::string("solver failure: ") + e.what());
  }
  return ep.rec;
}

RunRecord slap_run(const ProblemSpec& spec, const SimConfig& sim) {
  Episode ep(spec, sim, RunMode::SLAP);
  const int n = spec.intervals;
  try {
    auto t0 = Clock::now();
    const FactorGraph g = build_steap_graph(spec, ep.model);
    Trajectory plan = values_trajectory(optimize_batch(g, spec.solver), ep.rec.times);
    ep.rec.initial_plan_time_s = seconds_since(t0);
    ep.rec.estimated.times = {ep.rec.times[0]};
    ep.rec.estimated.states = {plan.states[0]};

    for (int i = 0; i < n; ++i) {
      StepRecord step;
      if (!ep.advance(i, plan, step)) {
        ep.rec.steps.push_back(std::move(step));
        break;
      }
      const Measurement z = simulate_measurement(step.truth.config, sim.n_cam, spec.sigma_meas_floor, ep.cam);
      step.measurement = z.mean;

      t0 = Clock::now();
      // Filter: previous estimate (with the commanded velocity) propagated by the GP prior.
      // The estimate carries the measurement covariance; the command is taken as known.
      const MarkovState anchor(ep.rec.estimated.states.back().config, plan.states[i].velocity);
      Matrix anchor_cov = fix_covariance(spec);
      if (i > 0) anchor_cov.topLeftCorner(z.covariance.rows(), z.covariance.cols()) = z.covariance;
      FactorGraph filter;
      filter.values[0] = anchor;
      filter.values[1] = MarkovState(z.mean, plan.states[i + 1].velocity);
      filter.add(std::make_shared<FixFactor>(FactorKind::StartFix, 0, anchor, anchor_cov));
      filter.add(gp_factor(spec, 0, 1));
      filter.add(measurement_factor(1, z));
      // Velocity is unmeasured: the command plus dynamics noise.
      const int d = static_cast<int>(z.covariance.rows());
      const double sv = std::max(sim.n_dyn, spec.sigma_meas_floor);
      Matrix vel_cov = Matrix::Identity(2 * d, 2 * d) * 1e4;
      vel_cov.bottomRightCorner(d, d) = Matrix::Identity(d, d) * sv * sv;
      filter.add(std::make_shared<FixFactor>(FactorKind::GoalFix, 1, filter.values[1], vel_cov));
      const MarkovState current = optimize_batch(filter, spec.solver).at(1);

      plan.states[i + 1] = current;
      std::size_t vars = 1;
      if (i + 1 < n) {
        Matrix current_cov = Matrix::Identity(2 * d, 2 * d) * sv * sv;
        current_cov.topLeftCorner(d, d) = z.covariance;
        const FactorGraph fut = future_graph(spec, ep.model, plan, i + 1, current, current_cov);
        vars = fut.values.size();
        for (const auto& [k, s] : optimize_batch(fut, spec.solver)) {
          if (static_cast<int>(k) > i + 1) plan.states[k] = s;
        }
      }
      step.time_s = seconds_since(t0);
      step.reeliminated = vars;
      step.estimate = current;
      ep.rec.estimated.times.push_back(ep.rec.times[i + 1]);
      ep.rec.estimated.states.push_back(current);
      ep.rec.steps.push_back(std::move(step));
    }
    if (ep.rec.reason.empty()) ep.rec.success = true;
    // A run that stopped early has no estimate for the last reached state.
    while (ep.rec.estimated.size() < ep.rec.ground_truth.size()) {
      ep.rec.estimated.times.push_back(ep.rec.ground_truth.times[ep.rec.estimated.size()]);
      ep.rec.estimated.states.push_back(plan.states[ep.rec.estimated.size()]);
    }
  } catch (const std::exception& e) {
    ep.fail(std::string("solver failure: ") + e.what());
  }
  return ep.rec;
}

RunRecord run_mode(RunMode mode, const ProblemSpec& spec, const SimConfig& sim) {
  switch (mode) {
    case RunMode::OL: return ol_run(spec, sim);
    case RunMode::SLAP: return slap_run(spec, sim);
    case RunMode::STEAP: return steap_run(spec, sim);
  }
  throw std::invalid_argument("unknown run mode");
}

Metrics compute_metrics(const RunRecord& record, const ProblemSpec& spec) {
  Metrics m;
  m.success = record.success;
  if (!record.ground_truth.empty()) {
    const Vector g = local_coordinates(spec.goal, record.ground_truth.states.back().config);
    m.goal_err_trans = g.head<2>().norm();
    m.goal_err_rot = std::abs(g[2]);
  }
  auto rms = [](const std::vector<Vector>& diffs, double& trans, double& rot) {
    double st = 0.0, sr = 0.0;
    for (const auto& d : diffs) {
      st += d.head<2>().squaredNorm();
      sr += d[2] * d[2];
    }
    trans = std::sqrt(st / diffs.size());
    rot = std::sqrt(sr / diffs.size());
  };
  if (record.mode != RunMode::OL && !record.estimated.empty()) {
    std::vector<Vector> diffs;
    const std::size_t n = std::min(record.estimated.size(), record.ground_truth.size());
    for (std::size_t k = 0; k < n; ++k) {
      diffs.push_back(local_coordinates(record.ground_truth.states[k].config, record.estimated.states[k].config));
    }
    double t = 0.0, r = 0.0;
    rms(diffs, t, r);
    m.est_err_trans = t;
    m.est_err_rot = r;
  }
  std::vector<Vector> meas;
  for (const auto& s : record.steps) {
    if (s.measurement) meas.push_back(local_coordinates(s.truth.config, *s.measurement));
  }
  if (!meas.empty()) {
    double t = 0.0, r = 0.0;
    rms(meas, t, r);
    m.meas_err_trans = t;
    m.meas_err_rot = r;
  }
  double total = 0.0;
  for (const auto& s : record.steps) total += s.time_s;
  if (!record.steps.empty()) m.mean_step_time = total / record.steps.size();
  return m;
}

}  // namespace steap::runtime
