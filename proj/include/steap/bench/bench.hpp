#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "steap/runtime/problem.hpp"

namespace steap::bench {

using runtime::Metrics;
using runtime::ProblemSpec;
using runtime::RunMode;
using runtime::SimConfig;

/// Random world recipe: the extent plus `obstacle_count` boxes of `obstacle_size`.
struct WorldTemplate {
  double width = 30.0;
  double height = 20.0;
  double cell_size = 0.1;
  int obstacle_count = 20;
  double obstacle_width = 1.0;
  double obstacle_height = 1.0;
  int max_rejections = 10000;
};

struct BenchConfig {
  ProblemSpec problem = ProblemSpec::benchmark_default();
  SimConfig sim;  ///< n_dyn, n_cam and seed are overridden per run
  WorldTemplate world;
  std::vector<double> n_dyn{0.1, 0.2};
  std::vector<double> n_cam{0.02, 0.1};
  int seeds = 40;
  std::uint64_t base_seed = 1;
  std::vector<RunMode> modes{RunMode::OL, RunMode::SLAP, RunMode::STEAP};
  std::string out = "bench_out";
  int jobs = 1;

  void validate() const;
};

void from_json(const nlohmann::json& j, BenchConfig& c);
void to_json(nlohmann::json& j, const BenchConfig& c);
BenchConfig load_bench_config(const std::string& path);

class WorldGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform obstacle centers, redrawn while a box comes within the body's max
/// reach + eps of the start or goal base position.
env::WorldSpec generate_world(std::uint64_t seed, const WorldTemplate& tmpl, const ProblemSpec& spec);

struct RunRow {
  RunMode mode = RunMode::STEAP;
  double n_dyn = 0.0;
  double n_cam = 0.0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
  std::string reason;
};

struct AggregateRow {
  RunMode mode = RunMode::STEAP;
  double n_dyn = 0.0;
  double n_cam = 0.0;
  int runs = 0;
  int successes = 0;
  double success_rate = 0.0;
  /// Means over successful runs only; empty when no run succeeded.
  std::optional<double> goal_err_trans, goal_err_rot;
  std::optional<double> est_err_trans, est_err_rot;
  std::optional<double> meas_err_trans, meas_err_rot;
  double mean_step_time = 0.0;  ///< over all runs
};

struct BenchResult {
  std::vector<RunRow> runs;
  std::vector<AggregateRow> rows;
};

/// Executes every (seed, n_dyn, n_cam, mode) run on up to cfg.jobs threads.
/// A run that throws is recorded as a failure.
BenchResult run_benchmark(const BenchConfig& cfg);
std::vector<AggregateRow> aggregate(const std::vector<RunRow>& runs);

/// aggregate.csv and runs.csv (deterministic) plus timing.csv (wall clock).
void write_csvs(const BenchResult& result, const std::string& dir);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string runs_csv(const std::vector<RunRow>& runs);
std::string timing_csv(const std::vector<AggregateRow>& rows);

/// %.6g, the CSV number format.
std::string format_number(double v);

/// Ground truth (green), final estimate (red) and the plan in force at
/// `snapshot` from that step on (blue). snapshot < 0 picks the middle step.
std::string render_svg(const runtime::RunRecord& record, int snapshot = -1);
void plot_run(const runtime::RunRecord& record, const std::string& path, int snapshot = -1);

}  // namespace steap::bench
