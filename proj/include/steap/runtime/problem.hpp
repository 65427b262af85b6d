#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "steap/env/body.hpp"
#include "steap/env/obstacle.hpp"
#include "steap/env/world.hpp"
#include "steap/gp/gp_prior.hpp"
#include "steap/inference/optimizer.hpp"

namespace steap {

void to_json(nlohmann::json& j, const MobileConfig& c);
void from_json(const nlohmann::json& j, MobileConfig& c);

}  // namespace steap

namespace steap::runtime {

/// Planning and estimation problem for one run.
struct ProblemSpec {
  MobileConfig start;
  MobileConfig goal;
  int intervals = 30;  ///< N; the graph holds N + 1 support states
  double total_time = 30.0;
  env::WorldSpec world;
  env::BodyModel body = env::BodyModel::planar_mobile_arm();
  gp::GpParams gp;
  env::HingeLossParams hinge;
  double sigma_fix = 1e-2;         ///< Sigma_fix = sigma_fix^2 I
  double sigma_meas_floor = 1e-3;  ///< lower bound on the reported measurement stddev
  int interp_per_interval = 5;
  int check_resolution = 10;
  double relinearize_threshold = 0.1;
  int relinearize_passes = 10;  ///< extra relinearize/solve passes after each measurement
  OrderingMode ordering = OrderingMode::Natural;
  SolverConfig solver;

  /// Benchmark defaults: diagonal crossing of the 30 x 20 m world with the arm tucked.
  static ProblemSpec benchmark_default();
  double dt() const { return total_time / intervals; }
  std::vector<double> support_times() const;
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct SimConfig {
  double n_dyn = 0.0;  ///< velocity noise bound, m/s (rad/s for rotations and joints)
  double n_cam = 0.0;  ///< measurement noise stddev, m (rad for rotations and joints)
  std::uint64_t seed = 1;
  int exec_substeps = 10;
  double rot_noise_scale = 1.0;  ///< rad/s of rotational noise per m/s of n_dyn
  void validate() const;
};

enum class RunMode { OL, SLAP, STEAP };
const char* to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct StepRecord {
  int index = 0;  ///< the run advanced from state index to index + 1
  MarkovState truth;
  std::optional<MobileConfig> measurement;
  std::optional<MarkovState> estimate;  ///< posterior of the state just reached
  std::uint64_t plan_hash = 0;
  double time_s = 0.0;
  std::size_t reeliminated = 0;  ///< STEAP: variables re-eliminated; SLAP: graph size
};

struct RunRecord {
  RunMode mode = RunMode::STEAP;
  std::uint64_t seed = 0;
  env::WorldSpec world;
  MobileConfig goal;
  std::vector<double> times;
  Trajectory ground_truth;            ///< states reached so far (index 0 is the start)
  Trajectory estimated;               ///< final posterior (empty for OL)
  std::vector<Trajectory> planned_per_step;  ///< plan in force before each step
  std::vector<StepRecord> steps;
  std::vector<MobileConfig> substep_trace;  ///< true configurations at every substep
  double initial_plan_time_s = 0.0;
  bool success = false;
  std::string reason;
};

struct Metrics {
  bool success = false;
  double goal_err_trans = 0.0;
  double goal_err_rot = 0.0;
  std::optional<double> est_err_trans;
  std::optional<double> est_err_rot;
  std::optional<double> meas_err_trans;  ///< raw measurement error, same RMS definition
  std::optional<double> meas_err_rot;
  double mean_step_time = 0.0;
};

void to_json(nlohmann::json& j, const ProblemSpec& p);
/// Missing keys keep the values already in `p`.
void from_json(const nlohmann::json& j, ProblemSpec& p);
void to_json(nlohmann::json& j, const SimConfig& s);
void from_json(const nlohmann::json& j, SimConfig& s);
void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);
/// Absent optional errors are written as null.
void to_json(nlohmann::json& j, const Metrics& m);

void save_record(const RunRecord& record, const std::string& path);
RunRecord load_record(const std::string& path);

/// Order-sensitive hash of a trajectory's states (FNV-1a over the raw doubles).
std::uint64_t trajectory_hash(const Trajectory& t);

}  // namespace steap::runtime
