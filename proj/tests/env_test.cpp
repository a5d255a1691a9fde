#include "dockrl/env.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <set>

#include "dockrl/errors.hpp"

namespace dockrl {
namespace {

DockingEnv make_env() { return DockingEnv(EnvConfig{}, HydroParams{}, RewardSpec{}); }

TEST(SampleInitialState, BandAndRest) {
  const EnvConfig cfg;
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const AuvState s = sample_initial_state(rng, cfg);
    const double ax = std::abs(s.pose.x), ay = std::abs(s.pose.y);
    ASSERT_GE(ax, cfg.spawn_inner);
    ASSERT_LE(ax, cfg.spawn_outer);
    ASSERT_GE(ay, cfg.spawn_inner);
    ASSERT_LE(ay, cfg.spawn_outer);
    ASSERT_GE(std::max(ax, ay), cfg.spawn_inner);
    ASSERT_GE(s.pose.psi, -std::numbers::pi);
    ASSERT_LT(s.pose.psi, std::numbers::pi);
    ASSERT_EQ(s.vel.u, 0.0);
    ASSERT_EQ(s.thr.n3, 0.0);
  }
}

TEST(SampleInitialState, AllQuadrantsOccur) {
  Rng rng(0);
  std::set<std::pair<bool, bool>> quadrants;
  for (int i = 0; i < 10000; ++i) {
    const AuvState s = sample_initial_state(rng, EnvConfig{});
    quadrants.insert({s.pose.x > 0, s.pose.y > 0});
  }
  EXPECT_EQ(quadrants.size(), 4u);
}

TEST(SampleInitialState, SeededDeterminism) {
  Rng a(5), b(5);
  const AuvState s = sample_initial_state(a, EnvConfig{});
  const AuvState t = sample_initial_state(b, EnvConfig{});
  EXPECT_EQ(std::memcmp(&s, &t, sizeof(s)), 0);
}

TEST(ClassifyTerminal, Examples) {
  const DockGeometry g;
  const EnvConfig cfg;
  AuvState s;
  s.pose = {9.01, 0, 0};
  EXPECT_EQ(classify_terminal(s, g, cfg, 1), TerminalKind::kViolation);
  s.pose = {0, -9.5, 0};
  EXPECT_EQ(classify_terminal(s, g, cfg, 1), TerminalKind::kViolation);
  s.pose = {0, 0, 0};
  EXPECT_EQ(classify_terminal(s, g, cfg, 3), TerminalKind::kGoal);
  s.pose = {3, -2, 1};
  EXPECT_EQ(classify_terminal(s, g, cfg, 150), TerminalKind::kTimeout);
  EXPECT_EQ(classify_terminal(s, g, cfg, 149), TerminalKind::kNone);
}

TEST(ClassifyTerminal, GoalNeedsYawAndPrecedence) {
  const DockGeometry g;
  const EnvConfig cfg;
  AuvState s;
  s.pose = {0.3, 0.3, 0.29};
  EXPECT_EQ(classify_terminal(s, g, cfg, 10), TerminalKind::kGoal);
  s.pose.psi = 0.31;
  EXPECT_EQ(classify_terminal(s, g, cfg, 10), TerminalKind::kNone);
  s.pose = {0.4, 0.4, 0.0};  // 0.566 m away
  EXPECT_EQ(classify_terminal(s, g, cfg, 10), TerminalKind::kNone);
  // Goal beats Timeout on the last step.
  s.pose = {0, 0, 0};
  EXPECT_EQ(classify_terminal(s, g, cfg, 150), TerminalKind::kGoal);
  // Violation beats everything.
  DockGeometry far = g;
  far.goal.x = 9.2;
  s.pose = {9.2, 0, 0};
  EXPECT_EQ(classify_terminal(s, far, cfg, 150), TerminalKind::kViolation);
}

TEST(DockingEnv, ResetObservation) {
  DockingEnv env = make_env();
  Rng rng(1);
  const Observation obs = env.reset(rng);
  for (int i = 3; i < kObsDim; ++i) EXPECT_EQ(obs[i], 0.0);
  EXPECT_LE(std::abs(obs[0]), 1.0);
  EXPECT_LE(std::abs(obs[1]), 1.0);
  EXPECT_LE(std::abs(obs[2]), 1.0);
  const Observation raw = raw_observation(env.state());
  EXPECT_DOUBLE_EQ(obs[0] * 9.0, raw[0]);

  Rng a(8), b(8);
  DockingEnv e1 = make_env(), e2 = make_env();
  EXPECT_EQ(e1.reset(a), e2.reset(b));
}

TEST(DockingEnv, ZeroActionFromRestPaysOutsideDistance) {
  DockingEnv env = make_env();
  AuvState s;
  s.pose = {-7.5, 8.0, 1.0};
  env.reset_to(s);
  const StepResult r = env.step({0, 0, 0});
  EXPECT_EQ(r.terminal, TerminalKind::kNone);
  EXPECT_FALSE(r.info.in_triangle);
  EXPECT_NEAR(r.reward, -5.0 * std::hypot(-7.5, 8.0), 1e-9);
  EXPECT_EQ(r.info.raw_state.pose.x, -7.5);
  EXPECT_EQ(r.info.components.thruster, 0.0);
  EXPECT_EQ(r.info.components.alignment, 0.0);
}

TEST(DockingEnv, LeavingWorkspaceIsViolation) {
  DockingEnv env = make_env();
  AuvState s;
  s.pose = {8.99, 0.0, 0.0};
  s.vel.u = 1.5;
  s.thr = {1, 0, 0};
  env.reset_to(s);
  const StepResult r = env.step({1, 0, 0});
  EXPECT_EQ(r.terminal, TerminalKind::kViolation);
  EXPECT_EQ(r.reward, -25000.0);
  EXPECT_TRUE(r.terminated());
  EXPECT_THROW(env.step({0, 0, 0}), UsageError);
}

TEST(DockingEnv, TimeoutPassesContinuousReward) {
  EnvConfig cfg;
  DockingEnv env(cfg, HydroParams{}, RewardSpec{});
  AuvState s;
  s.pose = {-4.0, 3.0, 2.0};
  env.reset_to(s);
  StepResult r;
  for (int i = 0; i < 150; ++i) {
    ASSERT_TRUE(env.active());
    r = env.step({0, 0, 0});
  }
  EXPECT_EQ(r.terminal, TerminalKind::kTimeout);
  EXPECT_FALSE(r.terminated());
  EXPECT_EQ(r.reward, r.info.components.continuous);
  EXPECT_FALSE(env.active());
}

TEST(DockingEnv, GoalAddsBonus) {
  DockingEnv env = make_env();
  AuvState s;
  s.pose = {0.1, 0.0, 0.0};
  env.reset_to(s);
  const StepResult r = env.step({0, 0, 0});
  EXPECT_EQ(r.terminal, TerminalKind::kGoal);
  EXPECT_NEAR(r.reward, 10000.0 + r.info.components.continuous, 1e-9);
}

TEST(DockingEnv, ActionsAreClampedAndNanRejected) {
  DockingEnv a = make_env(), b = make_env();
  AuvState s;
  s.pose = {5, 5, 0};
  a.reset_to(s);
  b.reset_to(s);
  const StepResult ra = a.step({3.0, -7.0, 1.5});
  const StepResult rb = b.step({1.0, -1.0, 1.0});
  EXPECT_EQ(ra.observation, rb.observation);
  EXPECT_EQ(ra.reward, rb.reward);
  EXPECT_THROW(a.step({std::nan(""), 0, 0}), DomainError);
}

TEST(DockingEnv, StepBeforeResetIsUsageError) {
  DockingEnv env = make_env();
  EXPECT_THROW(env.step({0, 0, 0}), UsageError);
}

TEST(DockingEnv, ReplayIsBitExact) {
  Rng action_rng(77);
  std::vector<Action> actions;
  for (int i = 0; i < 150; ++i) {
    actions.push_back({uniform(action_rng, -1, 1), uniform(action_rng, -1, 1),
                       uniform(action_rng, -1, 1)});
  }
  auto roll = [&] {
    DockingEnv env = make_env();
    Rng rng(3);
    env.reset(rng);
    std::vector<Observation> out;
    for (const Action& a : actions) {
      const StepResult r = env.step(a);
      out.push_back(r.observation);
      if (r.done()) break;
    }
    return out;
  };
  const auto a = roll();
  const auto b = roll();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(std::memcmp(a[i].data(), b[i].data(), sizeof(Observation)), 0);
  }
}

TEST(EnvConfig, Validation) {
  EnvConfig cfg;
  cfg.spawn_inner = 9.5;
  EXPECT_THROW(validate(cfg), DomainError);
  cfg = EnvConfig{};
  cfg.max_steps = 0;
  EXPECT_THROW(validate(cfg), DomainError);
}

TEST(DockingEnv, GoalBallInsideTriangleWhenApexOffsetCoversTolerance) {
  RewardSpec spec;
  // Apex moved back far enough that the tolerance disc fits in the wedge.
  spec.geometry.apex_offset =
      spec.geometry.goal_pos_tol / std::sin(spec.geometry.triangle_half_angle);
  Rng rng(4);
  for (int i = 0; i < 20000; ++i) {
    const double r = spec.geometry.goal_pos_tol * std::sqrt(uniform(rng, 0, 1));
    const double a = uniform(rng, -std::numbers::pi, std::numbers::pi);
    AuvState s;
    s.pose = {r * std::cos(a), r * std::sin(a), 0.0};
    ASSERT_EQ(classify_terminal(s, spec.geometry, EnvConfig{}, 1), TerminalKind::kGoal);
    ASSERT_TRUE(in_docking_triangle(s.pose, spec.geometry));
  }
}

}  // namespace
}  // namespace dockrl
