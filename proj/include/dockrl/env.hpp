#ifndef DOCKRL_ENV_HPP_
#define DOCKRL_ENV_HPP_

#include <array>
#include <cstdint>
#include <memory>

#include "dockrl/dynamics.hpp"
#include "dockrl/reward.hpp"
#include "dockrl/rng.hpp"

namespace dockrl {

constexpr int kObsDim = 9;
constexpr int kActDim = 3;

using Observation = std::array<double, kObsDim>;
using Action = std::array<double, kActDim>;

using AuvState = DynamicsState;

// [x, y, psi, u, v, r, n1, n2, n3]
Observation raw_observation(const AuvState& state);

struct EnvConfig {
  double workspace_half_extent = 9.0;
  double spawn_inner = 7.0;
  double spawn_outer = 9.0;
  int max_steps = 150;
  double dt = 0.2;
  bool scale_observations = true;
  Observation obs_scaling = {9.0, 9.0, 3.141592653589793, 2.0, 1.0,
                             1.0, 1.0, 1.0, 1.0};
};

void validate(const EnvConfig& cfg);

AuvState sample_initial_state(Rng& rng, const EnvConfig& cfg);

// Precedence: Violation > Goal > Timeout > None.
TerminalKind classify_terminal(const AuvState& state, const DockGeometry& geom,
                               const EnvConfig& cfg, int step_index);

struct StepInfo {
  AuvState raw_state;
  RewardBreakdown components;
  bool in_triangle = false;
  int step_index = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  TerminalKind terminal = TerminalKind::kNone;
  StepInfo info;

  bool done() const { return terminal != TerminalKind::kNone; }
  // Goal or Violation: no bootstrapping through this transition.
  bool terminated() const {
    return terminal == TerminalKind::kGoal ||
           terminal == TerminalKind::kViolation;
  }
};

class DockingEnv {
 public:
  DockingEnv(EnvConfig cfg, HydroParams hydro, RewardSpec reward,
             const std::string& reward_kind = "continuous");

  Observation reset(Rng& rng);
  // Starts an episode from an explicit state.
  Observation reset_to(const AuvState& state);
  // Action components are clamped to [-1, 1].  Throws DomainError on NaN and
  // UsageError when no episode is running.
  StepResult step(const Action& action);

  Observation observe() const;
  const AuvState& state() const { return state_; }
  int steps() const { return steps_; }
  bool active() const { return active_; }

  const EnvConfig& config() const { return cfg_; }
  const HydroParams& hydro() const { return hydro_; }
  const RewardSpec& reward_spec() const { return reward_spec_; }

 private:
  EnvConfig cfg_;
  HydroParams hydro_;
  RewardSpec reward_spec_;
  std::unique_ptr<RewardModel> reward_;
  AuvState state_;
  int steps_ = 0;
  bool active_ = false;
};

}  // namespace dockrl

#endif  // DOCKRL_ENV_HPP_
