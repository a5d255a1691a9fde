#ifndef DOCKRL_REWARD_HPP_
#define DOCKRL_REWARD_HPP_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "dockrl/dynamics.hpp"

namespace dockrl {

enum class TerminalKind { kNone, kGoal, kViolation, kTimeout };

const char* to_string(TerminalKind kind);
// Throws DomainError for unknown names.
TerminalKind terminal_kind_from_string(const std::string& name);

// Defaults are the published weight table.  w_psi and w_y only act inside
// the docking triangle.
struct RewardWeights {
  double w_d_inside = 30.0;
  double w_d_outside = 5.0;
  std::array<double, 3> w_th = {2.0, 5.0, 5.0};
  double w_psi = 1.3;
  double w_y = 1.2;
};

// The docking triangle has its apex at the goal position (shifted back along
// the axis by apex_offset) and opens along the direction axis_angle.
struct DockGeometry {
  Pose2D goal{0.0, 0.0, 0.0};
  double axis_angle = 0.0;
  double triangle_half_angle = 0.5235987755982988;  // 30 deg
  double triangle_length = 6.0;
  double apex_offset = 0.0;
  double goal_pos_tol = 0.5;
  double goal_yaw_tol = 0.3;
};

struct TerminalRewards {
  double r_goal = 10000.0;
  double r_violation = -25000.0;
};

struct RewardSpec {
  RewardWeights weights;
  DockGeometry geometry;
  TerminalRewards terminal;
  // Exchanges w_d_inside and w_d_outside.
  bool swap_distance_weights = false;
};

void validate(const RewardSpec& spec);

bool in_docking_triangle(const Pose2D& pose, const DockGeometry& geom);

double distance_reward(const Pose2D& pose, const DockGeometry& geom,
                       const RewardWeights& w, bool inside);

double thruster_reward(const ThrusterState& thr, const RewardWeights& w);

double alignment_reward(const Pose2D& pose, const DockGeometry& geom,
                        const RewardWeights& w, bool inside);

struct RewardBreakdown {
  double distance = 0.0;
  double thruster = 0.0;
  double alignment = 0.0;
  double continuous = 0.0;
  bool inside = false;
};

// Sum of the three shaping terms.  A single triangle test drives both the
// distance weight and the alignment branch.
RewardBreakdown continuous_reward(const Pose2D& pose, const BodyVelocity& vel,
                                  const ThrusterState& thr,
                                  const DockGeometry& geom,
                                  const RewardWeights& w);

double final_reward(double cont, TerminalKind outcome,
                    const TerminalRewards& tr);

// Applies swap_distance_weights.
RewardWeights effective_weights(const RewardSpec& spec);

// Pluggable reward implementations selected by name from config.
class RewardModel {
 public:
  virtual ~RewardModel() = default;
  virtual std::string name() const = 0;
  // Shaping term for the state after a step.
  virtual RewardBreakdown shaping(const DynamicsState& state) const = 0;
  // Reward actually handed to the agent.
  virtual double combine(const RewardBreakdown& shaping,
                         TerminalKind outcome) const = 0;
};

class ContinuousDockingReward : public RewardModel {
 public:
  explicit ContinuousDockingReward(RewardSpec spec);
  std::string name() const override { return "continuous"; }
  RewardBreakdown shaping(const DynamicsState& state) const override;
  double combine(const RewardBreakdown& shaping,
                 TerminalKind outcome) const override;

 private:
  RewardSpec spec_;
  RewardWeights weights_;
};

std::vector<std::string> reward_model_names();
// Throws DomainError for unknown names.
std::unique_ptr<RewardModel> make_reward_model(const std::string& name,
                                               const RewardSpec& spec);

}  // namespace dockrl

#endif  // DOCKRL_REWARD_HPP_
