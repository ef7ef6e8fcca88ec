#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "isacbb/bnb.hpp"
#include "isacbb/closed_form.hpp"
#include "isacbb/error.hpp"
#include "isacbb/extract.hpp"
#include "isacbb/io.hpp"
#include "oracles.hpp"

using namespace isacbb;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("isacbb_test_" + name)).string();
}

}  // namespace

TEST(Io, InstanceRoundTripIsBitExact) {
  ScenarioParams p;
  p.seed = 77;
  p.rho = 0.123456789012345;
  const ProblemInstance a = gen_scenario2(p);
  const ProblemInstance b = instance_from_json(instance_to_json(a));
  EXPECT_EQ(b.num_users, a.num_users);
  EXPECT_EQ(b.num_tx, a.num_tx);
  EXPECT_EQ(b.power_dbm, a.power_dbm);
  EXPECT_EQ(b.rho, a.rho);
  EXPECT_EQ(b.seed, a.seed);
  EXPECT_EQ(b.scenario, 2);
  for (int k = 0; k < a.num_users; ++k) EXPECT_EQ(b.channels[k], a.channels[k]);

  const std::string path = temp_path("inst.json");
  write_instance(path, a);
  EXPECT_EQ(read_instance(path).channels[2], a.channels[2]);
  std::filesystem::remove(path);
}

TEST(Io, InstanceErrors) {
  try {
    instance_from_json("{not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  try {
    instance_from_json(R"({"K":1,"Nt":2,"Nr":4,"L":4,"P_T_dBm":0,"sigmaC2":1,"sigmaS2":1,"rho":1,"channels":[[[1,0]]]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(read_instance("/nonexistent/dir/x.json"), Error);
}

TEST(Io, SolutionRoundTripReproducesObjective) {
  ScenarioParams p;
  p.num_users = 1;
  p.seed = 3;
  const ProblemInstance inst = gen_scenario1(p);
  const SolutionReport r = make_report(inst, recover_beamformers(solve_single_user(inst), inst), "single-user");
  EXPECT_TRUE(std::isnan(r.certified_gap));
  const SolutionReport back = solution_from_json(solution_to_json(r));
  EXPECT_EQ(back.method, "single-user");
  EXPECT_EQ(back.objective, r.objective);
  EXPECT_TRUE(std::isnan(back.lower_bound));
  EXPECT_EQ(back.solution.rx.dense(), r.solution.rx.dense());
  EXPECT_EQ(back.solution.beamformers[0], r.solution.beamformers[0]);
  EXPECT_NEAR(objective(inst, back.solution), r.objective, 1e-9);
}

TEST(Io, WeightsRoundTrip) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  GnnWeights w = GnnWeights::zeros(2, 5);
  for (Eigen::Index i = 0; i < w.p_user.size(); ++i) w.p_user.data()[i] = g(rng);
  w.layers[1].z3(2, 3) = 0.1;
  w.beta(4) = -1.0 / 3.0;
  const GnnWeights b = weights_from_json(weights_to_json(w));
  EXPECT_EQ(b.depth, 2);
  EXPECT_EQ(b.hidden, 5);
  EXPECT_EQ(b.p_user, w.p_user);
  EXPECT_EQ(b.layers[1].z3, w.layers[1].z3);
  EXPECT_EQ(b.beta, w.beta);
  EXPECT_THROW(weights_from_json(R"({"format":"other"})"), Error);
}

TEST(Io, ParityVectorsRoundTrip) {
  NodeGraph g;
  g.num_tx = 2;
  g.num_users = 1;
  g.antenna = Eigen::Vector2d(1.5, 0.25);
  g.user = Eigen::MatrixXd::Constant(1, kUserFeatures, 0.1);
  g.edge = {{1, 2, 3, 4}, {5, 6, 7, 8}};
  const auto back = parity_vectors_from_json(parity_vectors_to_json({{g, 0.625}}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].score, 0.625);
  EXPECT_EQ(back[0].graph.antenna, g.antenna);
  EXPECT_EQ(back[0].graph.user, g.user);
  EXPECT_EQ(back[0].graph.edge, g.edge);
  EXPECT_EQ(graph_from_json(graph_to_json(g)).edge_at(1, 0)[2], 7.0);
}

TEST(Io, TraceCsvRoundTrip) {
  BnbTrace t;
  t.records = {{0, -3.25, -1.0 / 3.0, 0, 1, 2, TraceAction::kBranch},
               {1, -2.0, -1.0 / 3.0, 4, 3, -1, TraceAction::kPrune},
               {2, -0.5, -1.0 / 3.0, -1, 0, -1, TraceAction::kStop}};
  std::stringstream ss;
  write_trace_csv(ss, t);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "t,L,U,gap,node_id,depth,k_star,action");
  EXPECT_EQ(read_trace_csv(ss), t.records);
}

TEST(Io, ParityFilesReproduceScores) {
  // What an external trainer exports: weights plus (graph, score) vectors.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 0.3);
  GnnWeights w = GnnWeights::zeros(3, 16);
  auto fill = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  };
  fill(w.p_ant);
  fill(w.p_user);
  fill(w.beta);
  for (auto& l : w.layers) {
    fill(l.z1);
    fill(l.z2);
    fill(l.z3);
  }
  std::vector<ParityVector> vectors;
  for (int i = 0; i < 100; ++i) {
    NodeGraph gr;
    gr.num_tx = 6;
    gr.num_users = 1 + i % 3;
    gr.antenna = Eigen::VectorXd::NullaryExpr(6, [&] { return g(rng); });
    gr.user = Eigen::MatrixXd::NullaryExpr(gr.num_users, kUserFeatures, [&] { return g(rng); });
    gr.edge.resize(static_cast<std::size_t>(6 * gr.num_users));
    for (auto& e : gr.edge)
      for (double& x : e) x = g(rng);
    vectors.push_back({gr, policy_score(gr, w)});
  }
  const std::string wp = temp_path("weights.json"), vp = temp_path("vectors.json");
  write_text_file(wp, weights_to_json(w));
  write_text_file(vp, parity_vectors_to_json(vectors));
  const GnnWeights w2 = read_weights(wp);
  const auto v2 = parity_vectors_from_json(read_text_file(vp));
  ASSERT_EQ(v2.size(), 100u);
  for (const auto& v : v2) EXPECT_NEAR(policy_score(v.graph, w2), v.score, 1e-12);
  std::filesystem::remove(wp);
  std::filesystem::remove(vp);
}
