#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "steap/graph/factor_graph.hpp"
#include "steap/inference/isam.hpp"
#include "steap/runtime/problem.hpp"
#include "steap/runtime/rng.hpp"

namespace steap::runtime {

/// Rng stream indices derived from SimConfig::seed. The same streams feed
/// every mode, so OL, SLAP and STEAP see common random numbers.
inline constexpr std::uint64_t kDynamicsStream = 1;
inline constexpr std::uint64_t kMeasurementStream = 2;

/// SDF + body + hinge shared by all obstacle factors of one problem.
std::shared_ptr<const ObstacleModel> make_obstacle_model(const ProblemSpec& spec);

/// Constant-velocity geodesic from start to goal; endpoints at rest.
Trajectory initialize_trajectory(const ProblemSpec& spec);

/// Planning graph: GP priors, start/goal fixes, one obstacle factor per state and
/// interp_per_interval interpolated obstacle factors per interval. Values hold the
/// initial trajectory. Pass `model` to share an already built SDF.
FactorGraph build_steap_graph(const ProblemSpec& spec,
                              std::shared_ptr<const ObstacleModel> model = nullptr);

struct ExecutionResult {
  MarkovState next;
  std::vector<MobileConfig> trace;  ///< exec_substeps + 1 configs, trace[0] = current
};

/// Plays the planned segment's substep displacements from the true state, adding
/// uniform velocity noise in [-n_dyn, n_dyn] per tangent component (rotations and
/// joints scaled by rot_noise_scale) at every substep.
ExecutionResult simulate_execute(const MarkovState& current, const MarkovState& plan_i,
                                 const MarkovState& plan_next, double dt, const Matrix& qc,
                                 const SimConfig& sim, Rng& rng);

struct Measurement {
  MobileConfig mean;
  Matrix covariance;
};

/// mean = retract(truth, N(0, n_cam^2 I)); covariance = max(n_cam, floor)^2 I.
Measurement simulate_measurement(const MobileConfig& truth, double n_cam, double sigma_floor,
                                 Rng& rng);

/// Called after each STEAP step's incremental update (step = index of the state just reached).
using StepHook = std::function<void(int step, const Isam& isam)>;

RunRecord steap_run(const ProblemSpec& spec, const SimConfig& sim, const StepHook& hook = {});
RunRecord ol_run(const ProblemSpec& spec, const SimConfig& sim);
RunRecord slap_run(const ProblemSpec& spec, const SimConfig& sim);
RunRecord run_mode(RunMode mode, const ProblemSpec& spec, const SimConfig& sim);

Metrics compute_metrics(const RunRecord& record, const ProblemSpec& spec);

}  // namespace steap::runtime
