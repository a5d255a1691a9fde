#ifndef DOCKRL_AGENT_HPP_
#define DOCKRL_AGENT_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "dockrl/env.hpp"
#include "dockrl/nn.hpp"

namespace dockrl {

using MatrixF = Eigen::MatrixXf;

struct AgentConfig {
  std::string algo = "td3";  // td3 | sac | ppo
  std::vector<int> hidden_sizes = {64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 256;
  int buffer_capacity = 100000;
  int warmup_steps = 1000;
  int updates_per_step = 1;  // off-policy gradient steps per env step
  // Environment rewards are multiplied by this before they reach the
  // learner; environment returns and metrics are unaffected.
  double reward_scale = 1e-3;
  double final_layer_scale = 1e-3;

  double td3_lr = 1e-3;
  double exploration_noise_std = 0.1;
  double target_noise_std = 0.2;
  double target_noise_clip = 0.5;
  int policy_delay = 2;

  double sac_lr = 3e-4;
  double sac_initial_alpha = 0.2;
  double sac_target_entropy = -3.0;

  double ppo_lr = 3e-4;
  double ppo_clip = 0.2;
  double gae_lambda = 0.95;
  int rollout_length = 2048;
  int epochs_per_rollout = 10;
  int minibatch_size = 64;
  double ent_coef = 0.0;
  double max_grad_norm = 0.5;
  double ppo_initial_log_std = 0.0;
};

// Throws DomainError naming the field.
void validate(const AgentConfig& cfg);

struct Transition {
  Observation state{};
  Action action{};
  double reward = 0.0;
  Observation next_state{};
  // True for Goal/Violation only; a Timeout is a truncation.
  bool terminal = false;
};

struct LossReport {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;
  bool actor_updated = false;
  bool updated = false;

  bool finite() const;
};

// Deterministic action selection from a frozen actor network.
class Policy {
 public:
  Policy(std::string algo, Mlp actor);
  Action act(const Observation& obs) const;
  const Mlp& actor() const { return actor_; }
  const std::string& algo() const { return algo_; }

 private:
  std::string algo_;
  Mlp actor_;
};

// Loads the actor of a checkpoint.  `path` is either the actor file or the
// checkpoint directory holding actor.bin.
Policy load_policy(const std::string& algo, const std::filesystem::path& path);

class Agent {
 public:
  virtual ~Agent() = default;
  // Training-time action, including exploration.
  virtual Action explore(const Observation& obs) = 0;
  virtual Action act(const Observation& obs) const = 0;
  // Feeds one environment transition; may run gradient updates.
  // episode_end is true for terminal and truncated steps.
  virtual void observe(const Transition& t, bool episode_end) = 0;
  virtual const LossReport& last_report() const = 0;
  virtual void save(const std::filesystem::path& dir) const = 0;
  virtual void load(const std::filesystem::path& dir) = 0;
  virtual Policy policy() const = 0;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, std::uint64_t seed);

// Helpers shared by the agents.
MatrixF to_column(const Observation& obs);
Action to_action(const MatrixF& column);
std::vector<int> layer_sizes(int input, const std::vector<int>& hidden,
                             int output);

}  // namespace dockrl

#endif  // DOCKRL_AGENT_HPP_
