#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "graph_fixtures.hpp"
#include "steap/inference/isam.hpp"
#include "steap/inference/optimizer.hpp"

namespace steap {
namespace {

using testing::ChainSpec;
using testing::euclidean_chain;
using testing::random_vector;
using testing::uniform;

// Planning chain of Fig. 4: GP priors between consecutive states, fixes at both
// ends. Every state starts at rest at the origin, which is already the optimum.
FactorGraph planning_chain(int n) {
  FactorGraph g;
  for (int i = 0; i < n; ++i) g.values[i] = MarkovState::at_rest(MobileConfig::euclidean(Vector::Zero(1)));
  for (int i = 0; i + 1 < n; ++i) g.add(std::make_shared<GpPriorFactor>(i, i + 1, 1.0, Matrix::Identity(1, 1)));
  g.add(std::make_shared<FixFactor>(FactorKind::StartFix, 0, g.values[0], Matrix::Identity(2, 2) * 1e-4));
  g.add(std::make_shared<FixFactor>(FactorKind::GoalFix, n - 1, g.values[n - 1], Matrix::Identity(2, 2) * 1e-4));
  return g;
}

std::map<Key, Vector> dense_delta(const LinearSystem& sys) {
  Vector b;
  const Matrix a = sys.dense_jacobian(&b);
  const Vector x = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  std::map<Key, Vector> out;
  for (const auto& [k, off] : sys.column_offsets()) out[k] = x.segment(off, sys.dims.at(k));
  return out;
}

double max_diff(const std::map<Key, Vector>& a, const std::map<Key, Vector>& b) {
  double worst = 0.0;
  for (const auto& [k, v] : a) worst = std::max(worst, (v - b.at(k)).cwiseAbs().maxCoeff());
  return worst;
}

// Random sparse linear system with a unary anchor on every variable.
LinearSystem random_system(std::mt19937_64& rng, int n) {
  LinearSystem sys;
  for (int k = 0; k < n; ++k) sys.dims[k] = 1 + static_cast<int>(uniform(rng, 0, 3));
  auto add = [&](std::vector<Key> keys) {
    JacobianFactor f;
    const int rows = 1 + static_cast<int>(uniform(rng, 0, 3));
    for (Key k : keys) f.blocks.push_back(random_vector(rng, rows * sys.dims[k]).reshaped(rows, sys.dims[k]));
    f.keys = std::move(keys);
    f.rhs = random_vector(rng, rows);
    sys.factors.push_back(std::move(f));
  };
  for (int k = 0; k < n; ++k) {
    JacobianFactor f;
    f.keys = {static_cast<Key>(k)};
    f.blocks = {Matrix::Identity(sys.dims[k], sys.dims[k]) * uniform(rng, 0.5, 2.0)};
    f.rhs = random_vector(rng, sys.dims[k]);
    sys.factors.push_back(std::move(f));
  }
  const int extra = n + static_cast<int>(uniform(rng, 0, n));
  for (int i = 0; i < extra; ++i) {
    std::vector<Key> keys{static_cast<Key>(uniform(rng, 0, n))};
    const int arity = 1 + static_cast<int>(uniform(rng, 0, 3));
    while (static_cast<int>(keys.size()) < std::min(arity, n)) {
      const Key k = static_cast<Key>(uniform(rng, 0, n));
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    add(keys);
  }
  return sys;
}

std::vector<std::vector<Key>> keys_of(const LinearSystem& sys) {
  std::vector<std::vector<Key>> keys;
  for (const auto& f : sys.factors) keys.push_back(f.keys);
  return keys;
}

std::vector<Key> variables_of(const LinearSystem& sys) {
  std::vector<Key> v;
  for (const auto& [k, d] : sys.dims) v.push_back(k);
  return v;
}

TEST(Ordering, ChainNatural) {
  const FactorGraph g = planning_chain(5);
  EXPECT_EQ(compute_ordering(g, OrderingMode::Natural), (Ordering{0, 1, 2, 3, 4}));
  EXPECT_EQ(elimination_fill({{0, 1}, {1, 2}, {2, 3}, {3, 4}}, {0, 1, 2, 3, 4}), 0u);
}

TEST(Ordering, SingleVariable) {
  FactorGraph g;
  g.values[7] = MarkovState::at_rest(MobileConfig::euclidean(Vector::Zero(1)));
  EXPECT_EQ(compute_ordering(g, OrderingMode::MinDegree), (Ordering{7}));
  EXPECT_EQ(compute_ordering(g, OrderingMode::Natural), (Ordering{7}));
}

TEST(Ordering, MinDegreeTieBreakAndConstraints) {
  // star centred at 0: once two leaves are gone the hub ties with leaf 3 and wins on id
  const std::vector<std::vector<Key>> star{{0, 1}, {0, 2}, {0, 3}};
  EXPECT_EQ(compute_ordering(star, {0, 1, 2, 3}, OrderingMode::MinDegree), (Ordering{1, 2, 0, 3}));
  EXPECT_EQ(compute_ordering(star, {0, 1, 2, 3}, OrderingMode::MinDegree, {1}), (Ordering{2, 3, 0, 1}));
  EXPECT_EQ(ordering_mode_from_string("min-degree"), OrderingMode::MinDegree);
  EXPECT_THROW(ordering_mode_from_string("colamd"), std::invalid_argument);
}

TEST(Ordering, MinDegreeFillNearBruteForceOptimum) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 5;
    std::vector<std::vector<Key>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (uniform(rng, 0, 1) < 0.35) edges.push_back({static_cast<Key>(a), static_cast<Key>(b)});
      }
    }
    // triangulate along a random order so the graph is chordal
    Ordering random_order(n);
    std::iota(random_order.begin(), random_order.end(), 0);
    std::shuffle(random_order.begin(), random_order.end(), rng);
    std::map<Key, std::set<Key>> adj;
    for (const auto& e : edges) {
      adj[e[0]].insert(e[1]);
      adj[e[1]].insert(e[0]);
    }
    std::set<Key> done;
    for (Key v : random_order) {
      std::vector<Key> later;
      for (Key u : adj[v]) if (!done.contains(u)) later.push_back(u);
      for (Key a : later) {
        for (Key b : later) {
          if (a < b && !adj[a].contains(b)) {
            adj[a].insert(b);
            adj[b].insert(a);
            edges.push_back({a, b});
          }
        }
      }
      done.insert(v);
    }
    Ordering vars(n);
    std::iota(vars.begin(), vars.end(), 0);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    Ordering perm = vars;
    do {
      best = std::min(best, elimination_fill(edges, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const std::size_t md = elimination_fill(edges, compute_ordering(edges, vars, OrderingMode::MinDegree));
    EXPECT_LE(md, 3 * best) << trial;
  }
}

TEST(Eliminate, ChainBayesNetMatchesFigure4) {
  const FactorGraph g = planning_chain(5);
  const auto net = eliminate(linearize(g), compute_ordering(g, OrderingMode::Natural));
  ASSERT_EQ(net.size(), 5u);
  for (Key j = 0; j < 4; ++j) {
    EXPECT_EQ(net[j].frontal, j);
    EXPECT_EQ(net[j].separator, (std::vector<Key>{j + 1}));
  }
  EXPECT_TRUE(net[4].separator.empty());
}

TEST(Eliminate, SingleUnaryFactor) {
  LinearSystem sys;
  sys.dims[3] = 2;
  sys.factors.push_back({{3}, {Matrix::Identity(2, 2) * 2.0}, Vector::Ones(2)});
  const auto net = eliminate(sys, {3});
  ASSERT_EQ(net.size(), 1u);
  EXPECT_TRUE(net[0].separator.empty());
  EXPECT_LE((back_substitute(net).at(3) - Vector::Constant(2, 0.5)).norm(), 1e-14);
}

TEST(Eliminate, MatchesDenseSolve) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    const LinearSystem sys = random_system(rng, 2 + trial % 11);
    const auto truth = dense_delta(sys);
    for (OrderingMode mode : {OrderingMode::Natural, OrderingMode::MinDegree}) {
      const Ordering ord = compute_ordering(keys_of(sys), variables_of(sys), mode);
      const auto net = eliminate(sys, ord);
      EXPECT_LE(max_diff(back_substitute(net), truth), 1e-9) << trial;
      const BayesTree tree = BayesTree::build(net);
      EXPECT_NO_THROW(tree.check_invariants());
      EXPECT_LE(max_diff(tree.solve(), back_substitute(net)), 1e-10);
    }
  }
}

TEST(Eliminate, RankDeficiencyNamesVariable) {
  LinearSystem sys;
  sys.dims = {{0, 1}, {1, 1}};
  sys.factors.push_back({{0}, {Matrix::Ones(1, 1)}, Vector::Ones(1)});
  sys.factors.push_back({{1}, {Matrix::Zero(1, 1)}, Vector::Ones(1)});
  try {
    eliminate(sys, {0, 1});
    FAIL() << "expected IndeterminantSystem";
  } catch (const IndeterminantSystem& e) {
    EXPECT_EQ(e.key(), 1u);
  }
}

TEST(BayesTree, ChainCliquesMatchFigure5) {
  const FactorGraph g = planning_chain(5);
  const BayesTree tree = BayesTree::build(eliminate(linearize(g), compute_ordering(g, OrderingMode::Natural)));
  EXPECT_EQ(tree.clique_count(), 4u);
  EXPECT_EQ(tree.dump(),
            "3 4 : | parent -\n"
            "2 : 3 | parent 3 4\n"
            "1 : 2 | parent 2\n"
            "0 : 1 | parent 1\n");
  EXPECT_EQ(tree.clique_of(3), tree.clique_of(4));
}

TEST(BayesTree, DenseGraphIsOneClique) {
  LinearSystem sys;
  sys.dims = {{0, 1}, {1, 1}, {2, 1}};
  Matrix a(3, 1);
  a << 1, 2, 3;
  sys.factors.push_back({{0, 1, 2}, {Matrix::Identity(3, 3).col(0), Matrix::Identity(3, 3).col(1), Matrix(a)}, Vector::Ones(3)});
  const BayesTree tree = BayesTree::build(eliminate(sys, {0, 1, 2}));
  EXPECT_EQ(tree.clique_count(), 1u);
  EXPECT_EQ(tree.dump(), "0 1 2 : | parent -\n");
}

TEST(Isam, UnaryFactorLeavesLowerChainUntouched) {
  const FactorGraph g = planning_chain(5);
  Isam isam;
  isam.update(g.factors, g.values);
  const CliquePtr low = isam.tree().shared_clique_of(0);
  const CliquePtr mid = isam.tree().shared_clique_of(1);
  const auto meas = std::make_shared<MeasurementFactor>(2, MobileConfig::euclidean(Vector::Constant(1, 2.5)),
                                                        Matrix::Identity(1, 1) * 0.1);
  const UpdateStats stats = isam.update({meas});
  EXPECT_EQ(stats.reeliminated, 3u);
  EXPECT_EQ(stats.reused_subtrees, 1u);
  EXPECT_EQ(isam.tree().shared_clique_of(0), low);
  EXPECT_EQ(isam.tree().shared_clique_of(1), mid);
  EXPECT_NO_THROW(isam.tree().check_invariants());
}

TEST(Isam, RootOnlyUpdate) {
  const FactorGraph g = planning_chain(5);
  Isam isam;
  isam.update(g.factors, g.values);
  const std::vector<Key> root = isam.tree().roots().front()->frontals();
  const CliquePtr below = isam.tree().shared_clique_of(2);
  const auto meas = std::make_shared<MeasurementFactor>(4, MobileConfig::euclidean(Vector::Constant(1, 4.2)),
                                                        Matrix::Identity(1, 1) * 0.1);
  const UpdateStats stats = isam.update({meas});
  EXPECT_EQ(stats.reeliminated, root.size());
  EXPECT_EQ(isam.tree().shared_clique_of(2), below);
}

TEST(Isam, StreamingMeasurementsMatchBatch) {
  std::mt19937_64 rng(63);
  const ChainSpec spec{.states = 12, .dof = 2, .dt = 0.5};
  FactorGraph g = euclidean_chain(spec, rng);
  IsamParams params;
  params.relinearize_threshold = 0.0;
  Isam isam(params);
  isam.update(g.factors, g.values);
  for (int i = 0; i < spec.states; ++i) {
    const auto meas = std::make_shared<MeasurementFactor>(
        i, MobileConfig::euclidean(random_vector(rng, spec.dof, 3.0)), Matrix::Identity(2, 2) * 0.05);
    g.add(meas);
    isam.update({meas});
    EXPECT_LE(testing::max_tangent_diff(isam.estimate(), testing::dense_normal_solve(g)), 1e-8) << i;
    EXPECT_NO_THROW(isam.tree().check_invariants());
  }
}

TEST(Isam, NewVariablesAndRemoval) {
  std::mt19937_64 rng(64);
  FactorGraph g = euclidean_chain({.states = 6, .dof = 1}, rng);
  Isam isam;
  const UpdateStats first = isam.update(g.factors, g.values);
  EXPECT_EQ(first.new_factor_slots.size(), g.factors.size());

  // extend the chain by one state
  const MarkovState extra = MarkovState::at_rest(MobileConfig::euclidean(Vector::Constant(1, 2.0)));
  const auto link = std::make_shared<GpPriorFactor>(5, 6, 1.0, Matrix::Identity(1, 1));
  const auto pin = std::make_shared<MeasurementFactor>(6, extra.config, Matrix::Identity(1, 1) * 0.2);
  const auto pin_vel = std::make_shared<FixFactor>(FactorKind::GoalFix, 6, extra, Matrix::Identity(2, 2));
  EXPECT_THROW(isam.update({link}), MissingVariable);
  isam.update({link, pin, pin_vel}, {{6, extra}});
  g.values[6] = extra;
  g.factors.insert(g.factors.end(), {link, pin, pin_vel});
  EXPECT_LE(testing::max_tangent_diff(isam.estimate(), testing::dense_normal_solve(g)), 1e-8);

  // drop the original goal fix (slot 6)
  ASSERT_EQ(isam.factor(6)->kind(), FactorKind::GoalFix);
  isam.update({}, {}, {6});
  g.factors.erase(g.factors.begin() + 6);
  EXPECT_LE(testing::max_tangent_diff(isam.estimate(), testing::dense_normal_solve(g)), 1e-8);
  EXPECT_THROW(isam.update({}, {}, {6}), std::out_of_range);
  EXPECT_EQ(isam.factors().size(), g.factors.size());
}

TEST(Isam, RelinearizationMarks) {
  const FactorGraph g = planning_chain(4);
  Isam isam;
  isam.update(g.factors, g.values);
  // values already optimal: nothing to relinearize
  EXPECT_TRUE(isam.mark_relinearization(1e-9).empty());
  const auto meas = std::make_shared<MeasurementFactor>(1, MobileConfig::euclidean(Vector::Constant(1, 3.0)),
                                                        Matrix::Identity(1, 1) * 0.01);
  isam.update({meas});
  const auto all = isam.mark_relinearization(0.0);
  EXPECT_FALSE(all.empty());
  for (Key k : all) EXPECT_GT(isam.delta().at(k).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Isam, NonlinearConvergesToBatchOptimum) {
  std::mt19937_64 rng(65);
  FactorGraph g;
  const int n = 8;
  const Matrix qc = Matrix::Identity(5, 5);
  for (int i = 0; i < n; ++i) {
    MarkovState s = MarkovState::at_rest(MobileConfig(Se2Pose(i, 0.5 * std::sin(i), 0.2 * i), Vector::Zero(2)));
    g.values[i] = retract(s, random_vector(rng, 10, 0.1));
  }
  for (int i = 0; i + 1 < n; ++i) g.add(std::make_shared<GpPriorFactor>(i, i + 1, 1.0, qc));
  g.add(std::make_shared<FixFactor>(FactorKind::StartFix, 0, MarkovState::at_rest(g.values[0].config), Matrix::Identity(10, 10) * 1e-4));
  g.add(std::make_shared<FixFactor>(FactorKind::GoalFix, n - 1, MarkovState::at_rest(g.values[n - 1].config), Matrix::Identity(10, 10) * 1e-4));
  for (int i = 1; i + 1 < n; i += 2) {
    g.add(std::make_shared<MeasurementFactor>(i, retract(g.values[i].config, random_vector(rng, 5, 0.3)), Matrix::Identity(5, 5) * 0.04));
  }
  IsamParams params;
  params.relinearize_threshold = 0.0;
  Isam isam(params);
  isam.update(g.factors, g.values);
  isam.converge(50, 1e-10);
  // the default stopping rule (relative decrease 1e-6) leaves ~1e-5 in the states
  SolverConfig tight;
  tight.relative_tolerance = 1e-14;
  tight.absolute_tolerance = 1e-11;
  const Values batch = optimize_batch(g, tight);
  EXPECT_LE(testing::max_tangent_diff(isam.estimate(), batch), 1e-6);
}

TEST(Isam, DeterministicStructure) {
  std::mt19937_64 a(66), b(66);
  const FactorGraph ga = euclidean_chain({.states = 9, .dof = 2, .measure_every = 2}, a);
  const FactorGraph gb = euclidean_chain({.states = 9, .dof = 2, .measure_every = 2}, b);
  Isam ia({.ordering = OrderingMode::MinDegree}), ib({.ordering = OrderingMode::MinDegree});
  ia.update(ga.factors, ga.values);
  ib.update(gb.factors, gb.values);
  EXPECT_EQ(ia.tree().dump(), ib.tree().dump());
}

}  // namespace
}  // namespace steap
