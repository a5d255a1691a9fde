#include "dockrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "dockrl/errors.hpp"

namespace dockrl {

Observation raw_observation(const AuvState& s) {
  return {s.pose.x, s.pose.y, s.pose.psi, s.vel.u, s.vel.v,
          s.vel.r,  s.thr.n1, s.thr.n2,   s.thr.n3};
}

void validate(const EnvConfig& cfg) {
  if (!(0.0 < cfg.spawn_inner && cfg.spawn_inner < cfg.spawn_outer &&
        cfg.spawn_outer <= cfg.workspace_half_extent)) {
    throw DomainError(
        "env: need 0 < spawn_inner < spawn_outer <= workspace_half_extent");
  }
  if (cfg.max_steps < 1) throw DomainError("env: max_steps must be >= 1");
  if (!(cfg.dt > 0.0)) throw DomainError("env: dt must be > 0");
  for (double d : cfg.obs_scaling) {
    if (!(d > 0.0)) throw DomainError("env: obs_scaling entries must be > 0");
  }
}

AuvState sample_initial_state(Rng& rng, const EnvConfig& cfg) {
  auto coordinate = [&] {
    const double magnitude = uniform(rng, cfg.spawn_inner, cfg.spawn_outer);
    return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
  };
  AuvState s;
  s.pose.x = coordinate();
  s.pose.y = coordinate();
  s.pose.psi = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return s;
}

TerminalKind classify_terminal(const AuvState& state, const DockGeometry& geom,
                               const EnvConfig& cfg, int step_index) {
  const Pose2D& p = state.pose;
  if (std::abs(p.x) > cfg.workspace_half_extent ||
      std::abs(p.y) > cfg.workspace_half_extent) {
    return TerminalKind::kViolation;
  }
  const double dist = std::hypot(p.x - geom.goal.x, p.y - geom.goal.y);
  if (dist <= geom.goal_pos_tol &&
      std::abs(wrap_angle(p.psi - geom.goal.psi)) <= geom.goal_yaw_tol) {
    return TerminalKind::kGoal;
  }
  if (step_index >= cfg.max_steps) return TerminalKind::kTimeout;
  return TerminalKind::kNone;
}

DockingEnv::DockingEnv(EnvConfig cfg, HydroParams hydro, RewardSpec reward,
                       const std::string& reward_kind)
    : cfg_(std::move(cfg)),
      hydro_(hydro),
      reward_spec_(std::move(reward)),
      reward_(make_reward_model(reward_kind, reward_spec_)) {
  validate(cfg_);
  validate(hydro_);
  validate(reward_spec_);
}

Observation DockingEnv::reset(Rng& rng) {
  return reset_to(sample_initial_state(rng, cfg_));
}

Observation DockingEnv::reset_to(const AuvState& state) {
  state_ = state;
  steps_ = 0;
  active_ = true;
  return observe();
}

Observation DockingEnv::observe() const {
  Observation obs = raw_observation(state_);
  if (cfg_.scale_observations) {
    for (int i = 0; i < kObsDim; ++i) obs[i] /= cfg_.obs_scaling[i];
  }
  return obs;
}

StepResult DockingEnv::step(const Action& action) {
  if (!active_) throw UsageError("step called without an active episode");
  for (double a : action) {
    if (std::isnan(a)) throw DomainError("step: NaN action component");
  }
  const ThrusterState cmd = clamp_thrusters({action[0], action[1], action[2]});
  state_ = step_dynamics(state_, cmd, hydro_, cfg_.dt);
  ++steps_;

  StepResult out;
  out.info.raw_state = state_;
  out.info.components = reward_->shaping(state_);
  out.info.in_triangle = out.info.components.inside;
  out.info.step_index = steps_;
  out.terminal =
      classify_terminal(state_, reward_spec_.geometry, cfg_, steps_);
  out.reward = reward_->combine(out.info.components, out.terminal);
  out.observation = observe();
  if (out.done()) active_ = false;
  return out;
}

}  // namespace dockrl
