#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "steap/bench/bench.hpp"
#include "steap/env/sdf.hpp"
#include "steap/runtime/runner.hpp"

namespace steap::bench {
namespace {

// 12 x 8 m world crossed in 10 intervals with 4 random boxes.
BenchConfig small_config() {
  BenchConfig c;
  Vector tucked(2);
  tucked << 0.0, 2.6;
  const double yaw = std::atan2(4.0, 8.0);
  c.problem.start = MobileConfig(Se2Pose(-4.0, -2.0, yaw), tucked);
  c.problem.goal = MobileConfig(Se2Pose(4.0, 2.0, yaw), tucked);
  c.problem.intervals = 10;
  c.problem.total_time = 10.0;
  c.problem.gp.dt_default = 1.0;
  c.world.width = 12.0;
  c.world.height = 8.0;
  c.world.obstacle_count = 4;
  c.n_dyn = {0.1};
  c.n_cam = {0.05};
  c.seeds = 2;
  c.modes = {RunMode::STEAP};
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(GenerateWorld, DeterministicPerSeed) {
  const BenchConfig c;
  const env::WorldSpec a = generate_world(5, c.world, c.problem), b = generate_world(5, c.world, c.problem);
  const env::WorldSpec d = generate_world(6, c.world, c.problem);
  ASSERT_EQ(a.obstacles.size(), 20u);
  for (std::size_t i = 0; i < a.obstacles.size(); ++i) {
    EXPECT_EQ(a.obstacles[i].center, b.obstacles[i].center);
  }
  EXPECT_NE(a.obstacles[0].center, d.obstacles[0].center);
}

TEST(GenerateWorld, ZeroObstaclesGivesEmptyWorld) {
  BenchConfig c;
  c.world.obstacle_count = 0;
  EXPECT_TRUE(generate_world(1, c.world, c.problem).obstacles.empty());
}

TEST(GenerateWorld, BenchmarkWorldsKeepEndpointsFree) {
  const BenchConfig c;
  const MobileConfig ends[] = {c.problem.start, c.problem.goal};
  for (std::uint64_t s = 1; s <= 40; ++s) {
    const env::WorldSpec w = generate_world(s, c.world, c.problem);
    w.validate();
    const env::SignedDistanceField sdf = env::build_sdf(w);
    for (const auto& e : ends) EXPECT_GT(env::min_clearance(e, c.problem.body, sdf), c.problem.hinge.eps) << s;
  }
}

TEST(GenerateWorld, CrowdedTemplateFails) {
  BenchConfig c;
  c.world.obstacle_count = 5;
  c.world.obstacle_width = 29.0;
  c.world.obstacle_height = 19.0;
  c.world.max_rejections = 100;
  EXPECT_THROW(generate_world(1, c.world, c.problem), WorldGenerationError);
}

TEST(RunBenchmark, CountsRunsAndRows) {
  const BenchResult r = run_benchmark(small_config());
  EXPECT_EQ(r.runs.size(), 2u);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].runs, 2);
  const int succ = std::count_if(r.runs.begin(), r.runs.end(), [](const RunRow& x) { return x.metrics.success; });
  EXPECT_EQ(r.rows[0].successes, succ);
  EXPECT_DOUBLE_EQ(r.rows[0].success_rate, succ / 2.0);
}

TEST(RunBenchmark, RerunAndParallelGiveIdenticalCsvs) {
  BenchConfig c = small_config();
  c.modes = {RunMode::OL, RunMode::SLAP, RunMode::STEAP};
  c.n_cam = {0.02, 0.1};
  const auto dir = std::filesystem::temp_directory_path() / "steap_bench_test";
  std::filesystem::remove_all(dir);
  write_csvs(run_benchmark(c), (dir / "a").string());
  write_csvs(run_benchmark(c), (dir / "b").string());
  c.jobs = 3;
  write_csvs(run_benchmark(c), (dir / "c").string());
  for (const char* f : {"aggregate.csv", "runs.csv"}) {
    const std::string a = slurp(dir / "a" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir / "b" / f)) << f;
    EXPECT_EQ(a, slurp(dir / "c" / f)) << f;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "timing.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Aggregate, PermutationInvariantAndSuccessOnly) {
  std::vector<RunRow> runs;
  for (int i = 0; i < 6; ++i) {
    RunRow r;
    r.mode = i % 2 ? RunMode::OL : RunMode::STEAP;
    r.n_dyn = 0.1;
    r.n_cam = 0.02;
    r.seed = i;
    r.metrics.success = i < 4;
    r.metrics.goal_err_trans = i + 1.0;
    if (r.mode == RunMode::STEAP) r.metrics.est_err_trans = 0.1 * (i + 1);
    runs.push_back(r);
  }
  const auto rows = aggregate(runs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mode, RunMode::OL);
  EXPECT_DOUBLE_EQ(rows[0].success_rate, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*rows[0].goal_err_trans, 3.0);  // runs 1 and 3 succeeded
  EXPECT_FALSE(rows[0].est_err_trans.has_value());
  EXPECT_DOUBLE_EQ(*rows[1].goal_err_trans, 2.0);  // runs 0 and 2
  EXPECT_NEAR(*rows[1].est_err_trans, 0.2, 1e-12);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(runs.begin(), runs.end(), rng);
    EXPECT_EQ(aggregate_csv(aggregate(runs)), aggregate_csv(rows));
  }
}

TEST(Csv, SixSignificantDigits) {
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_number(0.5), "0.5");
  AggregateRow r;
  r.runs = 4;
  r.successes = 1;
  r.success_rate = 0.25;
  const std::string csv = aggregate_csv({r});
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "mode,n_dyn,n_cam,runs,successes,success_rate,goal_err_trans,goal_err_rot,est_err_trans,est_err_rot,"
            "meas_err_trans,meas_err_rot");
  EXPECT_NE(csv.find("STEAP,0,0,4,1,0.25,,,,,,"), std::string::npos);
}

TEST(BenchConfigJson, ParsesAllSections) {
  const auto j = nlohmann::json::parse(R"({
    "problem": {"intervals": 12, "qc_base": 0.5, "qc_arm": 0.25},
    "sim": {"exec_substeps": 4},
    "bench": {"world_template": {"extent": [20, 10], "obstacle_count": 3, "obstacle_size": [2, 1]},
              "n_dyn": [0.3], "n_cam": [0.01, 0.2], "seeds": 5, "base_seed": 100,
              "modes": ["OL", "STEAP"], "out": "somewhere", "jobs": 2}})");
  const BenchConfig c = j.get<BenchConfig>();
  EXPECT_EQ(c.problem.intervals, 12);
  EXPECT_DOUBLE_EQ(c.problem.gp.qc(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(c.problem.gp.qc(4, 4), 0.25);
  EXPECT_EQ(c.sim.exec_substeps, 4);
  EXPECT_EQ(c.world.width, 20.0);
  EXPECT_EQ(c.world.obstacle_count, 3);
  EXPECT_EQ(c.world.obstacle_width, 2.0);
  EXPECT_EQ(c.n_cam.size(), 2u);
  EXPECT_EQ(c.seeds, 5);
  EXPECT_EQ(c.base_seed, 100u);
  EXPECT_EQ(c.modes, (std::vector<RunMode>{RunMode::OL, RunMode::STEAP}));
  EXPECT_EQ(c.out, "somewhere");
  EXPECT_EQ(c.jobs, 2);
  const BenchConfig back = nlohmann::json(c).get<BenchConfig>();
  EXPECT_EQ(back.modes, c.modes);
  EXPECT_EQ(back.world.obstacle_height, 1.0);
}

TEST(BenchConfigJson, ValidationRejectsEmptyGrids) {
  BenchConfig c;
  c.n_dyn.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = BenchConfig{};
  c.seeds = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Plot, PolylinesMatchTrajectoryLengths) {
  BenchConfig c = small_config();
  c.problem.world = generate_world(1, c.world, c.problem);
  runtime::SimConfig sim;
  sim.n_dyn = 0.05;
  sim.n_cam = 0.02;
  const runtime::RunRecord rec = runtime::steap_run(c.problem, sim);
  const std::string svg = render_svg(rec, 3);
  auto points_of = [&](const std::string& id) {
    const std::regex re("id=\"" + id + "\"[^>]*points=\"([^\"]*)\"");
    std::smatch m;
    EXPECT_TRUE(std::regex_search(svg, m, re)) << id;
    const std::string pts = m[1];
    return static_cast<std::size_t>(std::count(pts.begin(), pts.end(), ','));
  };
  EXPECT_EQ(points_of("ground_truth"), rec.ground_truth.size());
  EXPECT_EQ(points_of("estimated"), rec.estimated.size());
  EXPECT_EQ(points_of("planned"), rec.planned_per_step[3].size() - 3);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace steap::bench
