#include "dockrl/reward.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dockrl/errors.hpp"

namespace dockrl {
namespace {

constexpr double kTol = 1e-9;

TEST(DockingTriangle, ApexAndLength) {
  const DockGeometry g;
  EXPECT_TRUE(in_docking_triangle({0, 0, 0}, g));
  EXPECT_FALSE(in_docking_triangle({g.triangle_length + 1, 0, 0}, g));
  EXPECT_TRUE(in_docking_triangle({g.triangle_length, 0, 0}, g));
  EXPECT_FALSE(in_docking_triangle({-0.01, 0, 0}, g));
}

TEST(DockingTriangle, InteriorPointAtHalfWidth) {
  const DockGeometry g;
  const double d = g.triangle_length / 2;
  EXPECT_TRUE(in_docking_triangle({d, d * std::tan(g.triangle_half_angle) * 0.5, 0}, g));
  EXPECT_TRUE(in_docking_triangle({d, d * std::tan(g.triangle_half_angle) * 0.999, 0}, g));
  EXPECT_FALSE(in_docking_triangle({d, d * std::tan(g.triangle_half_angle) * 1.001, 0}, g));
}

TEST(DockingTriangle, SymmetricAcrossAxis) {
  const DockGeometry g;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(-9, 9);
  for (int i = 0; i < 20000; ++i) {
    const double x = pos(rng), y = pos(rng);
    ASSERT_EQ(in_docking_triangle({x, y, 0}, g), in_docking_triangle({x, -y, 0}, g));
  }
}

TEST(DockingTriangle, RotatedAxisAndApexOffset) {
  DockGeometry g;
  g.axis_angle = std::numbers::pi / 2;  // opening towards +y
  EXPECT_TRUE(in_docking_triangle({0, 3, 0}, g));
  EXPECT_FALSE(in_docking_triangle({3, 0, 0}, g));
  g = DockGeometry{};
  g.apex_offset = 1.0;
  EXPECT_TRUE(in_docking_triangle({-0.4, 0.0, 0}, g));
  EXPECT_FALSE(in_docking_triangle({-1.1, 0.0, 0}, g));
  EXPECT_FALSE(in_docking_triangle({6.1, 0.0, 0}, g));
}

TEST(DistanceReward, Examples) {
  const DockGeometry g;
  const RewardWeights w;
  EXPECT_NEAR(distance_reward({0, 0, 0}, g, w, false), 0.0, kTol);
  EXPECT_NEAR(distance_reward({3, 4, 0}, g, w, false), -25.0, kTol);
  EXPECT_NEAR(distance_reward({2, 0, 0}, g, w, true), -60.0, kTol);
}

TEST(ThrusterReward, Examples) {
  const RewardWeights w;
  EXPECT_NEAR(thruster_reward({0, 0, 0}, w), 0.0, kTol);
  EXPECT_NEAR(thruster_reward({1, 1, 1}, w), -12.0, kTol);
  EXPECT_NEAR(thruster_reward({-0.5, 0.2, -0.2}, w), -3.0, kTol);
}

TEST(AlignmentReward, Examples) {
  const DockGeometry g;
  const RewardWeights w;
  EXPECT_EQ(alignment_reward({3, 2, 2.0}, g, w, false), 0.0);
  EXPECT_NEAR(alignment_reward({1, 0, 0}, g, w, true), 0.0, kTol);
  EXPECT_NEAR(alignment_reward({2, 1.0, 0.5}, g, w, true), -1.85, kTol);
  EXPECT_NEAR(alignment_reward({2, -1.0, -0.5}, g, w, true), -1.85, kTol);
}

TEST(AlignmentReward, YawErrorIsWrapped) {
  const DockGeometry g;
  const RewardWeights w;
  // psi = pi - 0.1 against goal 0 is a 3.04 rad error; psi = -pi + 0.1 too.
  EXPECT_NEAR(alignment_reward({1, 0, std::numbers::pi - 0.1}, g, w, true),
              -1.3 * (std::numbers::pi - 0.1), kTol);
  DockGeometry h = g;
  h.goal.psi = 3.0;
  EXPECT_NEAR(alignment_reward({1, 0, -3.0}, h, w, true),
              -1.3 * (2 * std::numbers::pi - 6.0), kTol);
}

TEST(ContinuousReward, Examples) {
  const DockGeometry g;
  const RewardWeights w;
  EXPECT_NEAR(continuous_reward({0, 0, 0}, {}, {0, 0, 0}, g, w).continuous, 0.0, kTol);
  // (3, 4) is outside the triangle: 4 > 3 tan 30.
  const RewardBreakdown b = continuous_reward({3, 4, 0}, {}, {1, 1, 1}, g, w);
  EXPECT_FALSE(b.inside);
  EXPECT_NEAR(b.continuous, -37.0, kTol);
  EXPECT_NEAR(continuous_reward({2, 0, 0}, {}, {0, 0, 0}, g, w).continuous, -60.0, kTol);
}

TEST(ContinuousReward, NeverPositive) {
  const DockGeometry g;
  const RewardWeights w;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(-9, 9), ang(-3.14, 3.14), unit(-1, 1);
  for (int i = 0; i < 20000; ++i) {
    const auto b = continuous_reward({pos(rng), pos(rng), ang(rng)}, {},
                                     {unit(rng), unit(rng), unit(rng)}, g, w);
    ASSERT_LE(b.continuous, 0.0);
    // Alignment only ever fires together with the inside distance weight.
    if (b.alignment != 0.0) ASSERT_TRUE(b.inside);
  }
}

TEST(ContinuousReward, MonotoneOnAxisBehindDock) {
  const DockGeometry g;
  const RewardWeights w;
  double prev = -1e300;
  for (double x = -9.0; x < -0.01; x += 0.05) {
    const double r = continuous_reward({x, 0, 0}, {}, {0, 0, 0}, g, w).continuous;
    ASSERT_GT(r, prev);
    prev = r;
  }
}

TEST(FinalReward, Branches) {
  TerminalRewards tr;
  EXPECT_NEAR(final_reward(-10, TerminalKind::kGoal, tr), 9990.0, kTol);
  EXPECT_EQ(final_reward(-10, TerminalKind::kViolation, tr), -25000.0);
  EXPECT_EQ(final_reward(-9999, TerminalKind::kViolation, tr), -25000.0);
  EXPECT_EQ(final_reward(-37, TerminalKind::kNone, tr), -37.0);
  EXPECT_EQ(final_reward(-37, TerminalKind::kTimeout, tr), -37.0);
  tr.r_goal = 15000;
  EXPECT_NEAR(final_reward(-2.5, TerminalKind::kGoal, tr), 14997.5, kTol);
}

TEST(RewardSpec, SwapDistanceWeights) {
  RewardSpec spec;
  spec.swap_distance_weights = true;
  const RewardWeights w = effective_weights(spec);
  EXPECT_EQ(w.w_d_inside, 5.0);
  EXPECT_EQ(w.w_d_outside, 30.0);
}

TEST(RewardSpec, Validation) {
  RewardSpec spec;
  EXPECT_NO_THROW(validate(spec));
  spec.geometry.triangle_half_angle = std::numbers::pi / 2;
  EXPECT_THROW(validate(spec), DomainError);
  spec = RewardSpec{};
  spec.terminal.r_violation = 1.0;
  EXPECT_THROW(validate(spec), DomainError);
  spec = RewardSpec{};
  spec.weights.w_th[1] = -1.0;
  EXPECT_THROW(validate(spec), DomainError);
}

TEST(RewardModel, RegistryByName) {
  const auto model = make_reward_model("continuous", RewardSpec{});
  EXPECT_EQ(model->name(), "continuous");
  DynamicsState s;
  s.pose = {3, 4, 0};
  s.thr = {1, 1, 1};
  EXPECT_NEAR(model->combine(model->shaping(s), TerminalKind::kNone), -37.0, kTol);
  EXPECT_THROW(make_reward_model("anderlini", RewardSpec{}), DomainError);
}

TEST(TerminalKindNames, RoundTrip) {
  for (auto k : {TerminalKind::kNone, TerminalKind::kGoal, TerminalKind::kViolation,
                 TerminalKind::kTimeout}) {
    EXPECT_EQ(terminal_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(terminal_kind_from_string("crash"), DomainError);
}

}  // namespace
}  // namespace dockrl
