#include <gtest/gtest.h>

#include <random>

#include "isacbb/error.hpp"
#include "isacbb/mer_solver.hpp"
#include "isacbb/relaxation.hpp"
#include "oracles.hpp"

using namespace isacbb;
using oracle::Mat;
using oracle::Vec;

namespace {

// Feasible interval for a implied by the four rows at (gamma, itf).
std::pair<double, double> a_range(const std::array<EnvelopeRow, 4>& rows, double g, double i) {
  double lo = -1e300, hi = 1e300;
  for (const auto& r : rows) {
    const double rest = r.coef_gamma * g + r.coef_itf * i + r.constant;
    if (r.coef_a > 0) lo = std::max(lo, -rest / r.coef_a);
    if (r.coef_a < 0) hi = std::min(hi, rest / -r.coef_a);
  }
  return {lo, hi};
}

}  // namespace

TEST(Envelope, UnitBoxExample) {
  const auto rows = envelope_constraints(0.0, 1.0, 1.0);
  const auto [lo, hi] = a_range(rows, 0.5, 0.5);
  EXPECT_NEAR(lo, 0.0, 1e-15);
  EXPECT_NEAR(hi, 0.5, 1e-15);
}

TEST(Envelope, DegenerateIntervalPinsProduct) {
  const double c = 2.5;
  const auto rows = envelope_constraints(c, c, 4.0);
  for (double i : {0.0, 1.0, 3.3, 4.0}) {
    const auto [lo, hi] = a_range(rows, c, i);
    EXPECT_NEAR(lo, c * i, 1e-12);
    EXPECT_NEAR(hi, c * i, 1e-12);
  }
}

TEST(Envelope, ContainsBilinearSurface) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 500; ++rep) {
    const double l = 10 * u(rng), h = l + 10 * u(rng), b = 5 * u(rng);
    const auto rows = envelope_constraints(l, h, b);
    for (int j = 0; j < 20; ++j) {
      const double g = l + (h - l) * u(rng), i = b * u(rng);
      for (const auto& r : rows) EXPECT_GE(r.slack(g * i, g, i), -1e-12 * (1 + g * i));
    }
  }
}

TEST(Envelope, TightAtCorners) {
  const double l = 1.0, h = 3.0, b = 2.0;
  const auto rows = envelope_constraints(l, h, b);
  for (double g : {l, h}) {
    for (double i : {0.0, 0.7, b}) {
      const auto [lo, hi] = a_range(rows, g, i);
      EXPECT_NEAR(lo, g * i, 1e-12);
      EXPECT_NEAR(hi, g * i, 1e-12);
    }
  }
  for (double i : {0.0, b}) {
    const auto [lo, hi] = a_range(rows, 2.2, i);
    EXPECT_NEAR(lo, 2.2 * i, 1e-12);
    EXPECT_NEAR(hi, 2.2 * i, 1e-12);
  }
}

TEST(Box, BisectHalvesInterval) {
  Box b{{0.0, 1.0}, {4.0, 3.0}};
  const auto [c1, c2] = bisect(b, 0);
  EXPECT_EQ(c1.lo, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(c1.hi, (std::vector<double>{2.0, 3.0}));
  EXPECT_EQ(c2.lo, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(c2.hi, (std::vector<double>{4.0, 3.0}));
  EXPECT_NEAR(c1.volume() + c2.volume(), b.volume(), 1e-12);
  EXPECT_TRUE(b.contains(c1));
  EXPECT_TRUE(b.contains(c2));
}

TEST(Box, BisectDegenerate) {
  Box b{{1.0}, {1.0}};
  const auto [c1, c2] = bisect(b, 0);
  EXPECT_EQ(c1.lo, c2.lo);
  EXPECT_EQ(c1.hi, c2.hi);
}

TEST(Box, VolumeOfRandomBisections) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    Box b{{u(rng), u(rng), u(rng)}, {}};
    for (double l : b.lo) b.hi.push_back(l + 0.1 + u(rng));
    const int k = rep % 3;
    const auto [c1, c2] = bisect(b, k);
    EXPECT_NEAR(c1.volume() + c2.volume(), b.volume(), 1e-12 * b.volume());
  }
}

TEST(Box, ValidateAndContains) {
  EXPECT_THROW((Box{{1.0}, {0.5}}.validate()), Error);
  EXPECT_THROW((Box{{-1.0}, {0.5}}.validate()), Error);
  EXPECT_THROW((Box{{0.0, 0.0}, {0.5}}.validate()), Error);
  const Box b{{0.0, 1.0}, {1.0, 2.0}};
  EXPECT_TRUE(b.contains(std::vector<double>{0.5, 1.5}));
  EXPECT_FALSE(b.contains(std::vector<double>{0.5, 2.5}));
  EXPECT_TRUE(b.contains(std::vector<double>{1.0 + 1e-10, 1.5}, 1e-9));
}

TEST(Box, RootBox) {
  ProblemInstance inst;
  inst.num_users = 2;
  inst.num_tx = 2;
  inst.power_dbm = 20.0;
  inst.sigma_c2 = 2.0;
  inst.channels = {Vec::Constant(2, 1.0), Vec::Constant(2, Complex(0, 2))};
  const Box r = root_box(inst);
  EXPECT_EQ(r.lo, (std::vector<double>{0.0, 0.0}));
  EXPECT_NEAR(r.hi[0], 100.0 * 2.0 / 2.0, 1e-12);
  EXPECT_NEAR(r.hi[1], 100.0 * 8.0 / 2.0, 1e-12);
}

TEST(BranchIndex, LargestRelativeGap) {
  const Box b{{0, 0, 0}, {1, 1, 1}};
  EXPECT_EQ(branch_index({0.1, 0.5, 0.2}, {0, 0, 0}, b), 1);
  EXPECT_EQ(branch_index({0.3, 0.3, 0.3}, {0, 0, 0}, b), 0);
  // Relative to 1 + repaired value.
  EXPECT_EQ(branch_index({2.0, 0.6}, {1.0, 0.0}, Box{{0, 0}, {3, 3}}), 1);
}

TEST(BranchIndex, SkipsDegenerateAndFallsBackToWidest) {
  const Box b{{0, 1, 0}, {1, 1, 4}};
  EXPECT_EQ(branch_index({0.1, 5.0, 0.2}, {0.1, 0.0, 0.0}, b), 2);
  EXPECT_EQ(branch_index({0.1, 1.0, 0.2}, {0.1, 1.0, 0.2}, b), 2);
  EXPECT_EQ(branch_index({1, 1}, {1, 1}, Box{{1, 1}, {1, 1}}), -1);
}

namespace {

ProblemInstance one_user_two_antennas() {
  ProblemInstance inst;
  inst.num_users = 1;
  inst.num_tx = 2;
  inst.power_dbm = 10.0 * std::log10(3.0);
  Vec h = Vec::Zero(2);
  h(0) = 1.0;
  inst.channels = {h};
  return inst;
}

}  // namespace

TEST(Repair, FormulaExample) {
  const ProblemInstance inst = one_user_two_antennas();
  RelaxationSolution r;
  r.rx = HermitianMatrix::diagonal(Eigen::Vector2d(2.0, 1.0));
  r.w = {HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 0.0))};  // interference 1
  r.gamma = {1.0};
  r.aux = {0.5};
  const FeasibleSolution f = repair(r, Box{{0.5}, {1.5}}, inst);
  ASSERT_EQ(f.solution.gamma.size(), 1u);
  EXPECT_NEAR(f.solution.gamma[0], 0.75, 1e-15);
  EXPECT_EQ(f.relaxed_gamma[0], 1.0);
  EXPECT_EQ(f.solution.rx.dense(), r.rx.dense());
  EXPECT_NEAR(f.value, oracle::objective(inst, r.rx.dense(), {0.75}), 1e-14);
}

TEST(Repair, ZeroInterferenceKeepsGamma) {
  const ProblemInstance inst = one_user_two_antennas();
  RelaxationSolution r;
  r.rx = HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 1.0));
  r.w = {HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 0.0))};
  r.gamma = {0.9};
  r.aux = {0.0};
  const FeasibleSolution f = repair(r, Box{{0.0}, {3.0}}, inst);
  EXPECT_NEAR(f.solution.gamma[0], 0.9, 1e-15);
  EXPECT_LE(feasibility_violation(inst, f.solution), 1e-12);
}

TEST(Feasibility, DetectsViolations) {
  const ProblemInstance inst = one_user_two_antennas();
  BeamformingSolution s;
  s.rx = HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 1.0));
  s.w = {HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 0.0))};
  s.gamma = {0.5};
  EXPECT_LE(feasibility_violation(inst, s), 0.0);
  s.gamma = {2.0};  // signal 1 < 2 * noise 1
  EXPECT_GT(feasibility_violation(inst, s), 0.1);
  s.gamma = {0.5};
  s.rx = HermitianMatrix::diagonal(Eigen::Vector2d(3.0, 1.0));  // power 4 > 3
  EXPECT_GT(feasibility_violation(inst, s), 0.1);
  s.rx = HermitianMatrix::diagonal(Eigen::Vector2d(0.5, 1.0));  // R - W not PSD
  EXPECT_GT(feasibility_violation(inst, s), 0.1);
}
