#include "dockrl/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "dockrl/errors.hpp"
#include "test_support.hpp"

namespace dockrl {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(WrapAngle, Examples) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(wrap_angle(kPi + 0.1), -kPi + 0.1, 1e-12);
  EXPECT_NEAR(wrap_angle(-3 * kPi), -kPi, 1e-12);
  EXPECT_EQ(wrap_angle(kPi), -kPi);
  EXPECT_EQ(wrap_angle(-kPi), -kPi);
}

TEST(WrapAngle, RangeAndCongruence) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = dist(rng);
    const double w = wrap_angle(a);
    EXPECT_GE(w, -kPi);
    EXPECT_LT(w, kPi);
    const double k = (a - w) / (2 * kPi);
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
}

TEST(WrapAngle, RejectsNonFinite) {
  EXPECT_THROW(wrap_angle(std::nan("")), DomainError);
  EXPECT_THROW(wrap_angle(INFINITY), DomainError);
}

TEST(Allocate, Examples) {
  const HydroParams p;
  const double full = p.k_t * p.n_max * p.n_max;
  Wrench w = allocate({0, 0, 0}, p);
  EXPECT_EQ(w.X, 0.0);
  EXPECT_EQ(w.Y, 0.0);
  EXPECT_EQ(w.N, 0.0);

  w = allocate({1, 0, 0}, p);
  EXPECT_DOUBLE_EQ(w.X, full);
  EXPECT_EQ(w.Y, 0.0);
  EXPECT_EQ(w.N, 0.0);

  const double a = 0.6;
  w = allocate({0, a, -a}, p);
  EXPECT_EQ(w.X, 0.0);
  EXPECT_NEAR(w.Y, 0.0, 1e-15);
  EXPECT_NEAR(w.N, 2 * p.k_t * p.L2 * a * std::abs(a) * p.n_max * p.n_max,
              1e-12);
}

TEST(Allocate, SameSignLateralIsPureSway) {
  const HydroParams p;
  const Wrench w = allocate({0, -0.4, -0.4}, p);
  EXPECT_LT(w.Y, 0.0);
  EXPECT_NEAR(w.N, 0.0, 1e-15);
}

TEST(Allocate, MaxSurgeThrustIsFortyNewton) {
  EXPECT_NEAR(allocate({1, 0, 0}, HydroParams{}).X, 40.0, 1e-12);
  EXPECT_NEAR(allocate({-1, 0, 0}, HydroParams{}).X, -40.0, 1e-12);
}

TEST(StepDynamics, EquilibriumIsFixedPoint) {
  const DynamicsState s{};
  const DynamicsState n = step_dynamics(s, {0, 0, 0}, HydroParams{}, 0.2);
  EXPECT_EQ(n.pose.x, 0.0);
  EXPECT_EQ(n.pose.y, 0.0);
  EXPECT_EQ(n.pose.psi, 0.0);
  EXPECT_EQ(n.vel.u, 0.0);
  EXPECT_EQ(n.vel.v, 0.0);
  EXPECT_EQ(n.vel.r, 0.0);
}

TEST(StepDynamics, SurgeDecaysWithoutCrossCoupling) {
  for (double dt : {0.05, 0.2, 0.5}) {
    DynamicsState s{};
    s.vel.u = 1.0;
    const DynamicsState n = step_dynamics(s, {0, 0, 0}, HydroParams{}, dt);
    EXPECT_LT(n.vel.u, 1.0);
    EXPECT_EQ(n.vel.v, 0.0);
    EXPECT_EQ(n.vel.r, 0.0);
  }
}

TEST(StepDynamics, OneHandEvaluatedEulerStep) {
  const HydroParams p;
  DynamicsState s{};
  s.thr = {1, 0, 0};
  const DynamicsState n = step_dynamics(s, {1, 0, 0}, p, 0.2);
  EXPECT_NEAR(n.vel.u, 0.2 * p.k_t * p.n_max * p.n_max / (p.m - p.Xu_dot),
              1e-12);
  EXPECT_EQ(n.vel.v, 0.0);
  EXPECT_EQ(n.vel.r, 0.0);
  // Pose uses the updated velocity.
  EXPECT_NEAR(n.pose.x, 0.2 * n.vel.u, 1e-15);
}

TEST(StepDynamics, ThrusterLagIsFirstOrder) {
  const HydroParams p;
  DynamicsState s{};
  const DynamicsState n = step_dynamics(s, {1, -1, 0.5}, p, 0.15);
  EXPECT_NEAR(n.thr.n1, 0.5, 1e-15);
  EXPECT_NEAR(n.thr.n2, -0.5, 1e-15);
  EXPECT_NEAR(n.thr.n3, 0.25, 1e-15);
  // A step longer than tau_n overshoots and is clamped.
  const DynamicsState m = step_dynamics(s, {1, -1, 1}, p, 0.6);
  EXPECT_EQ(m.thr.n1, 1.0);
  EXPECT_EQ(m.thr.n2, -1.0);
}

TEST(StepDynamics, VelocityCapsHold) {
  const HydroParams p;
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    DynamicsState s = testing_support::random_state(rng);
    for (int i = 0; i < 100; ++i) {
      s = step_dynamics(s, testing_support::random_command(rng), p, 0.2);
      ASSERT_LE(std::abs(s.vel.u), p.u_max);
      ASSERT_LE(std::abs(s.vel.v), p.v_max);
      ASSERT_LE(std::abs(s.vel.r), p.r_max);
      ASSERT_GE(s.pose.psi, -kPi);
      ASSERT_LT(s.pose.psi, kPi);
    }
  }
}

TEST(StepDynamics, NonFiniteStateRaisesDivergence) {
  DynamicsState s{};
  s.vel.u = std::nan("");
  EXPECT_THROW(step_dynamics(s, {0, 0, 0}, HydroParams{}, 0.2),
               SimulationDiverged);
  EXPECT_THROW(step_dynamics(DynamicsState{}, {0, 0, 0}, HydroParams{}, 0.0),
               DomainError);
}

TEST(StepDynamics, ZeroThrustDissipates) {
  const HydroParams p;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    DynamicsState s = testing_support::random_state(rng);
    s.thr = {0, 0, 0};
    double e = kinetic_energy_surrogate(s.vel, p);
    for (int i = 0; i < 150; ++i) {
      s = step_dynamics(s, {0, 0, 0}, p, 0.2);
      const double e_next = kinetic_energy_surrogate(s.vel, p);
      ASSERT_LE(e_next, e);
      e = e_next;
    }
  }
}

TEST(StepDynamics, MirrorSymmetry) {
  const HydroParams p;
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    DynamicsState a = testing_support::random_state(rng);
    DynamicsState b = testing_support::mirror(a);
    for (int i = 0; i < 150; ++i) {
      const ThrusterState cmd = testing_support::random_command(rng);
      a = step_dynamics(a, cmd, p, 0.2);
      b = step_dynamics(b, testing_support::mirror(cmd), p, 0.2);
      ASSERT_LE(testing_support::mirror_error(a, b), 1e-12);
    }
  }
}

TEST(StepDynamics, IsDeterministic) {
  const HydroParams p;
  std::mt19937_64 rng(9);
  const DynamicsState s = testing_support::random_state(rng);
  const ThrusterState cmd = testing_support::random_command(rng);
  const DynamicsState a = step_dynamics(s, cmd, p, 0.2);
  const DynamicsState b = step_dynamics(s, cmd, p, 0.2);
  EXPECT_EQ(std::memcmp(&a, &b, sizeof(a)), 0);
}

TEST(StepDynamics, HalvingTimeStepChangesEndpointLittle) {
  const HydroParams p;
  const ThrusterState cmd{0.8, 0.3, -0.1};
  auto endpoint = [&](double dt, int steps) {
    DynamicsState s{};
    for (int i = 0; i < steps; ++i) s = step_dynamics(s, cmd, p, dt);
    return s.pose;
  };
  const Pose2D coarse = endpoint(0.2, 150);
  const Pose2D fine = endpoint(0.1, 300);
  const double moved = std::hypot(fine.x, fine.y);
  ASSERT_GT(moved, 1.0);
  EXPECT_LT(std::hypot(coarse.x - fine.x, coarse.y - fine.y), 0.05 * moved);
}

TEST(HydroParams, DefaultsAreValidAndTerminalSpeedPlausible) {
  HydroParams p;
  EXPECT_NO_THROW(validate(p));
  DynamicsState s{};
  s.thr = {1, 0, 0};
  for (int i = 0; i < 500; ++i) s = step_dynamics(s, {1, 0, 0}, p, 0.2);
  // 15 u + 10 u^2 = 40
  EXPECT_NEAR(s.vel.u, (-15.0 + std::sqrt(225.0 + 1600.0)) / 20.0, 1e-6);
  p.tau_n = 0.0;
  EXPECT_THROW(validate(p), DomainError);
}

}  // namespace
}  // namespace dockrl
