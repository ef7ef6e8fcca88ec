#include <gtest/gtest.h>

#include "isacbb/closed_form.hpp"
#include "isacbb/error.hpp"
#include "isacbb/mer_solver.hpp"
#include "oracles.hpp"

using namespace isacbb;
using oracle::Mat;
using oracle::Vec;

namespace {

ProblemInstance unit_single_user(double rho) {
  ProblemInstance inst;
  inst.num_users = 1;
  inst.num_tx = 6;
  inst.power_dbm = 0.0;  // P_T = 1
  inst.rho = rho;
  Vec h = Vec::Zero(6);
  h(2) = 1.0;
  inst.channels = {h};
  return inst;
}

ProblemInstance orthogonal_instance(int k, int nt, std::uint64_t seed, double rho) {
  ScenarioParams p;
  p.num_users = k;
  p.num_tx = nt;
  p.seed = seed;
  p.rho = rho;
  ProblemInstance inst = gen_scenario1(p);
  oracle::orthogonalize(inst);
  return inst;
}

}  // namespace

TEST(SingleUser, UnitExampleRoot) {
  const ProblemInstance inst = unit_single_user(0.1);
  // 1/(1+G) = 0.1 (25/(1-G)^2 - 1/G^2) on (0, 1), by bisection.
  auto f = [](double g) { return 0.1 * (25.0 / ((1 - g) * (1 - g)) - 1.0 / (g * g)) - 1.0 / (1 + g); };
  double lo = 1e-12, hi = 1 - 1e-12;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (f(m) < 0 ? lo : hi) = m;
  }
  EXPECT_NEAR(single_user_gamma(inst), 0.5 * (lo + hi), 1e-10);
  EXPECT_NEAR(single_user_residual(inst, 0.5 * (lo + hi)), 0.0, 1e-6);
}

TEST(SingleUser, ResidualSignsAtEnds) {
  const ProblemInstance inst = unit_single_user(1.0);
  EXPECT_LT(single_user_residual(inst, 1e-6), 0.0);
  EXPECT_GT(single_user_residual(inst, 1.0 - 1e-6), 0.0);
}

TEST(SingleUser, SolutionStructure) {
  for (int scenario : {1, 2}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ScenarioParams p;
      p.num_users = 1;
      p.seed = seed;
      p.rho = 0.3 * static_cast<double>(seed);
      const ProblemInstance inst = scenario == 1 ? gen_scenario1(p) : gen_scenario2(p);
      const BeamformingSolution s = solve_single_user(inst);
      const double g = oracle::single_user_root(inst);
      EXPECT_NEAR(s.gamma[0], g, 1e-9 * g);
      const double p_lin = inst.power();
      EXPECT_NEAR(s.rx.trace(), p_lin, 1e-9 * p_lin);
      const auto ev = oracle::eigenvalues_desc(s.w[0].dense());
      EXPECT_LE(ev(1), 1e-10 * ev(0));
      EXPECT_NEAR(sinr(inst, s, 0), g, 1e-8 * (1 + g));
      EXPECT_NEAR(objective(inst, s), oracle::single_user_value(inst, g), 1e-9 * (1 + std::abs(objective(inst, s))));
      // R_X eigenvalues: lambda_1 on h, the rest equal.
      const Vec u = inst.channels[0].normalized();
      const double lam1 = oracle::quad(s.rx.dense(), u);
      EXPECT_NEAR(lam1, g * inst.sigma_c2 / inst.channels[0].squaredNorm(), 1e-9 * p_lin);
      const auto rev = oracle::eigenvalues_desc(s.rx.dense() - lam1 * u * u.adjoint());
      EXPECT_NEAR(rev(0), rev(4), 1e-9 * p_lin);
    }
  }
}

TEST(SingleUser, SingleAntenna) {
  ProblemInstance inst = unit_single_user(1.0);
  inst.num_tx = 1;
  inst.channels = {Vec::Constant(1, 2.0)};
  const BeamformingSolution s = solve_single_user(inst);
  EXPECT_NEAR(s.gamma[0], inst.max_sinr(0), 1e-12);
}

TEST(SingleUser, RejectsMultiUser) {
  ScenarioParams p;
  p.num_users = 2;
  EXPECT_THROW(solve_single_user(gen_scenario1(p)), Error);
}

TEST(Orthogonal, CheckOrthogonal) {
  ScenarioParams p;
  p.num_users = 3;
  ProblemInstance inst = gen_scenario1(p);
  EXPECT_FALSE(check_orthogonal(inst));
  oracle::orthogonalize(inst);
  EXPECT_TRUE(check_orthogonal(inst));
  try {
    ScenarioParams q;
    q.num_users = 3;
    solve_orthogonal_case(gen_scenario1(q));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kChannelsNotOrthogonal);
  }
}

TEST(Orthogonal, SingleUserAgreesWithClosedForm) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ScenarioParams p;
    p.num_users = 1;
    p.seed = seed;
    const ProblemInstance inst = gen_scenario1(p);
    const double a = objective(inst, solve_orthogonal_case(inst));
    const double b = objective(inst, solve_single_user(inst));
    EXPECT_NEAR(a, b, 1e-6 * (1 + std::abs(b)));
  }
}

TEST(Orthogonal, SymmetricFullLoadSplitsEvenly) {
  ProblemInstance inst;
  inst.num_users = 4;
  inst.num_tx = 4;
  inst.power_dbm = 20.0;
  for (int k = 0; k < 4; ++k) {
    Vec h = Vec::Zero(4);
    h(k) = 1.5;
    inst.channels.push_back(h);
  }
  const BeamformingSolution s = solve_orthogonal_case(inst);
  const auto ev = oracle::eigenvalues_desc(s.rx.dense());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev(i), 25.0, 1e-6);
}

TEST(Orthogonal, KktAndZeroInterference) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ProblemInstance inst = orthogonal_instance(3, 6, seed, 0.5 * static_cast<double>(seed));
    const BeamformingSolution s = solve_orthogonal_case(inst);
    const double p = inst.power();
    const Mat rx = s.rx.dense();
    EXPECT_NEAR(rx.trace().real(), p, 1e-8 * p);
    // Free eigenvalues give the power multiplier: rho / lambda^2 = mu.
    Mat proj = Mat::Identity(6, 6);
    for (int k = 0; k < 3; ++k) {
      const Vec u = inst.channels[k].normalized();
      proj -= u * u.adjoint();
    }
    const auto free_ev = oracle::eigenvalues_desc(proj * rx * proj);
    const double lam_free = free_ev(0);
    EXPECT_NEAR(free_ev(2), lam_free, 1e-7 * p);
    const double mu = inst.rho / (lam_free * lam_free);
    EXPECT_GT(mu, 0.0);
    for (int k = 0; k < 3; ++k) {
      const Vec u = inst.channels[k].normalized();
      const double lam = oracle::quad(rx, u);
      const double c = inst.channels[k].squaredNorm() / inst.sigma_c2;
      const double station = c / (1 + c * lam) + inst.rho / (lam * lam) - mu;
      EXPECT_NEAR(station, 0.0, 1e-6 * mu) << "seed " << seed << " user " << k;
      // Zero interference, SINR equals lambda_k c_k.
      EXPECT_NEAR(oracle::quad(rx - s.w[k].dense(), inst.channels[k]), 0.0, 1e-9 * p);
      EXPECT_NEAR(sinr(inst, s, k), lam * c, 1e-8 * lam * c);
      EXPECT_NEAR(s.gamma[k], lam * c, 1e-8 * lam * c);
    }
  }
}

TEST(Orthogonal, MoreUsersThanAntennasRejected) {
  ProblemInstance inst;
  inst.num_users = 3;
  inst.num_tx = 2;
  inst.channels = {Vec::Unit(2, 0), Vec::Unit(2, 1), Vec::Unit(2, 0)};
  EXPECT_THROW(solve_orthogonal_case(inst), Error);
}
