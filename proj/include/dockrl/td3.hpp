#ifndef DOCKRL_TD3_HPP_
#define DOCKRL_TD3_HPP_

#include "dockrl/agent.hpp"
#include "dockrl/replay_buffer.hpp"

namespace dockrl {

// clamp(actor(state) + N(0, noise_std^2), -1, 1).
Action td3_select_action(const Mlp& actor, const Observation& state,
                         double noise_std, Rng& rng);

// r + gamma * not_done * min(q1, q2), element-wise over a row batch.
MatrixF td3_critic_target(const MatrixF& rewards, const MatrixF& not_done,
                          const MatrixF& q1_next, const MatrixF& q2_next,
                          double gamma);

struct Td3Nets {
  Mlp actor, critic1, critic2;
  Mlp actor_target, critic1_target, critic2_target;
};

class Td3Agent : public Agent {
 public:
  Td3Agent(const AgentConfig& cfg, std::uint64_t seed);

  Action explore(const Observation& obs) override;
  Action act(const Observation& obs) const override;
  void observe(const Transition& t, bool episode_end) override;
  const LossReport& last_report() const override { return report_; }
  void save(const std::filesystem::path& dir) const override;
  void load(const std::filesystem::path& dir) override;
  Policy policy() const override;

  // One gradient update on an explicit batch (rewards already scaled).
  LossReport update(const TransitionBatch& batch);

  Td3Nets& nets() { return nets_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  long update_count() const { return updates_; }

 private:
  AgentConfig cfg_;
  Td3Nets nets_;
  Adam actor_opt_, critic1_opt_, critic2_opt_;
  ReplayBuffer buffer_;
  Rng explore_rng_, sample_rng_;
  long steps_ = 0;
  long updates_ = 0;
  LossReport report_;
};

}  // namespace dockrl

#endif  // DOCKRL_TD3_HPP_
