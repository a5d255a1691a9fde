#ifndef DOCKRL_PPO_HPP_
#define DOCKRL_PPO_HPP_

#include <vector>

#include "dockrl/agent.hpp"

namespace dockrl {

struct RolloutStep {
  Observation state{};
  Action action{};
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  bool terminal = false;     // Goal/Violation: no bootstrap
  bool episode_end = false;  // terminal or truncated: stop the GAE chain
  double next_value = 0.0;   // V(s_{t+1}), also valid after truncation
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma (1 - terminal_t) V(s_{t+1}) - V(s_t)
// A_t     = delta_t + gamma lambda (1 - end_t) A_{t+1}
GaeResult gae(const std::vector<RolloutStep>& rollout, double gamma,
              double lambda);

// Zero mean, unit variance (population std).
std::vector<double> normalize_advantages(const std::vector<double>& adv);

// min(ratio * adv, clamp(ratio, 1 - clip, 1 + clip) * adv).
double ppo_clipped_objective(double ratio, double advantage, double clip);
// d objective / d log_prob: ratio * adv when the unclipped term is selected,
// otherwise zero.
double ppo_objective_grad(double ratio, double advantage, double clip);

// Sum over action dimensions of the diagonal Gaussian log density.
double gaussian_log_prob(const Action& action, const Action& mean,
                         const Action& log_std);

class PpoAgent : public Agent {
 public:
  PpoAgent(const AgentConfig& cfg, std::uint64_t seed);

  Action explore(const Observation& obs) override;
  Action act(const Observation& obs) const override;
  void observe(const Transition& t, bool episode_end) override;
  const LossReport& last_report() const override { return report_; }
  void save(const std::filesystem::path& dir) const override;
  void load(const std::filesystem::path& dir) override;
  Policy policy() const override;

  LossReport update(const std::vector<RolloutStep>& rollout);

  // Largest |ratio - 1| over the first minibatch of the first epoch of the
  // most recent update.
  double first_minibatch_ratio_deviation() const { return first_ratio_dev_; }
  const std::vector<RolloutStep>& rollout() const { return rollout_; }
  Action log_std() const;

 private:
  double value_of(const Observation& obs) const;

  AgentConfig cfg_;
  Mlp policy_;
  Eigen::VectorXf log_std_;
  Eigen::VectorXf log_std_grad_;
  Mlp value_;
  Adam policy_opt_, value_opt_;
  Rng explore_rng_, sample_rng_;
  std::vector<RolloutStep> rollout_;
  double pending_log_prob_ = 0.0;
  double pending_value_ = 0.0;
  double first_ratio_dev_ = 0.0;
  LossReport report_;
};

}  // namespace dockrl

#endif  // DOCKRL_PPO_HPP_
