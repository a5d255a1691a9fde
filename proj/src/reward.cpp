#include "dockrl/reward.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "dockrl/errors.hpp"

namespace dockrl {

const char* to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::kNone:
      return "none";
    case TerminalKind::kGoal:
      return "goal";
    case TerminalKind::kViolation:
      return "violation";
    case TerminalKind::kTimeout:
      return "timeout";
  }
  return "none";
}

TerminalKind terminal_kind_from_string(const std::string& name) {
  if (name == "none") return TerminalKind::kNone;
  if (name == "goal") return TerminalKind::kGoal;
  if (name == "violation") return TerminalKind::kViolation;
  if (name == "timeout") return TerminalKind::kTimeout;
  throw DomainError("unknown terminal kind '" + name + "'");
}

void validate(const RewardSpec& spec) {
  const RewardWeights& w = spec.weights;
  if (w.w_d_inside < 0 || w.w_d_outside < 0 || w.w_psi < 0 || w.w_y < 0 ||
      w.w_th[0] < 0 || w.w_th[1] < 0 || w.w_th[2] < 0) {
    throw DomainError("reward: weights must be >= 0");
  }
  const DockGeometry& g = spec.geometry;
  if (!(g.triangle_half_angle > 0 &&
        g.triangle_half_angle < std::numbers::pi / 2)) {
    throw DomainError("reward: triangle_half_angle must be in (0, pi/2)");
  }
  if (!(g.triangle_length > 0)) {
    throw DomainError("reward: triangle_length must be > 0");
  }
  if (!(g.goal_pos_tol > 0) || !(g.goal_yaw_tol > 0)) {
    throw DomainError("reward: goal tolerances must be > 0");
  }
  if (!(spec.terminal.r_goal > 0 && spec.terminal.r_violation < 0)) {
    throw DomainError("reward: need r_goal > 0 > r_violation");
  }
}

bool in_docking_triangle(const Pose2D& pose, const DockGeometry& geom) {
  const double ca = std::cos(geom.axis_angle);
  const double sa = std::sin(geom.axis_angle);
  const double dx = pose.x - geom.goal.x;
  const double dy = pose.y - geom.goal.y;
  // Coordinates in the triangle frame, apex at the origin.
  const double along = ca * dx + sa * dy + geom.apex_offset;
  const double across = -sa * dx + ca * dy;
  if (along < 0.0 || along > geom.triangle_length + geom.apex_offset) {
    return false;
  }
  return std::abs(across) <= along * std::tan(geom.triangle_half_angle);
}

double distance_reward(const Pose2D& pose, const DockGeometry& geom,
                       const RewardWeights& w, bool inside) {
  const double w_d = inside ? w.w_d_inside : w.w_d_outside;
  return -w_d * std::hypot(pose.x - geom.goal.x, pose.y - geom.goal.y);
}

double thruster_reward(const ThrusterState& thr, const RewardWeights& w) {
  return -(w.w_th[0] * std::abs(thr.n1) + w.w_th[1] * std::abs(thr.n2) +
           w.w_th[2] * std::abs(thr.n3));
}

double alignment_reward(const Pose2D& pose, const DockGeometry& geom,
                        const RewardWeights& w, bool inside) {
  if (!inside) return 0.0;
  return -w.w_psi * std::abs(wrap_angle(pose.psi - geom.goal.psi)) -
         w.w_y * std::abs(pose.y - geom.goal.y);
}

RewardBreakdown continuous_reward(const Pose2D& pose, const BodyVelocity&,
                                  const ThrusterState& thr,
                                  const DockGeometry& geom,
                                  const RewardWeights& w) {
  RewardBreakdown out;
  out.inside = in_docking_triangle(pose, geom);
  out.distance = distance_reward(pose, geom, w, out.inside);
  out.thruster = thruster_reward(thr, w);
  out.alignment = alignment_reward(pose, geom, w, out.inside);
  out.continuous = out.distance + out.thruster + out.alignment;
  return out;
}

double final_reward(double cont, TerminalKind outcome,
                    const TerminalRewards& tr) {
  switch (outcome) {
    case TerminalKind::kGoal:
      return tr.r_goal + cont;
    case TerminalKind::kViolation:
      return tr.r_violation;
    case TerminalKind::kNone:
    case TerminalKind::kTimeout:
      break;
  }
  return cont;
}

RewardWeights effective_weights(const RewardSpec& spec) {
  RewardWeights w = spec.weights;
  if (spec.swap_distance_weights) std::swap(w.w_d_inside, w.w_d_outside);
  return w;
}

ContinuousDockingReward::ContinuousDockingReward(RewardSpec spec)
    : spec_(std::move(spec)), weights_(effective_weights(spec_)) {}

RewardBreakdown ContinuousDockingReward::shaping(
    const DynamicsState& state) const {
  return continuous_reward(state.pose, state.vel, state.thr, spec_.geometry,
                           weights_);
}

double ContinuousDockingReward::combine(const RewardBreakdown& shaping,
                                        TerminalKind outcome) const {
  return final_reward(shaping.continuous, outcome, spec_.terminal);
}

std::vector<std::string> reward_model_names() { return {"continuous"}; }

std::unique_ptr<RewardModel> make_reward_model(const std::string& name,
                                               const RewardSpec& spec) {
  if (name == "continuous") {
    return std::make_unique<ContinuousDockingReward>(spec);
  }
  throw DomainError("unknown reward kind '" + name + "'");
}

}  // namespace dockrl
