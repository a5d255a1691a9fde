#include "dockrl/td3.hpp"

#include <algorithm>

namespace dockrl {
namespace {

MatrixF concat_rows(const MatrixF& top, const MatrixF& bottom) {
  MatrixF out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

// MSE regression step towards target; returns the loss.
double critic_step(Mlp& critic, Adam& opt, const MatrixF& input,
                   const MatrixF& target) {
  critic.zero_grads();
  const MatrixF& q = critic.forward_cached(input);
  const MatrixF diff = q - target;
  const auto n = static_cast<float>(diff.cols());
  const double loss = diff.cast<double>().squaredNorm() / n;
  critic.backward(diff * (2.0f / n));
  opt.step(critic.parameter_blocks());
  return loss;
}

}  // namespace

Action td3_select_action(const Mlp& actor, const Observation& state,
                         double noise_std, Rng& rng) {
  Action a = to_action(actor.forward(to_column(state)));
  if (noise_std > 0.0) {
    for (double& x : a) x += noise_std * standard_normal(rng);
  }
  for (double& x : a) x = std::clamp(x, -1.0, 1.0);
  return a;
}

MatrixF td3_critic_target(const MatrixF& rewards, const MatrixF& not_done,
                          const MatrixF& q1_next, const MatrixF& q2_next,
                          double gamma) {
  const MatrixF q_min = q1_next.cwiseMin(q2_next);
  return rewards +
         (static_cast<float>(gamma) * not_done.array() * q_min.array())
             .matrix();
}

Td3Agent::Td3Agent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      actor_opt_(AdamConfig{cfg.td3_lr}),
      critic1_opt_(AdamConfig{cfg.td3_lr}),
      critic2_opt_(AdamConfig{cfg.td3_lr}),
      buffer_(static_cast<std::size_t>(cfg.buffer_capacity)),
      explore_rng_(make_rng(seed, Stream::kExploration)),
      sample_rng_(make_rng(seed, Stream::kSampling)) {
  validate(cfg_);
  Rng init = make_rng(seed, Stream::kInit);
  nets_.actor = Mlp(layer_sizes(kObsDim, cfg.hidden_sizes, kActDim),
                    Activation::kTanh);
  nets_.actor.initialize(init, cfg.final_layer_scale);
  const auto critic_sizes =
      layer_sizes(kObsDim + kActDim, cfg.hidden_sizes, 1);
  nets_.critic1 = Mlp(critic_sizes, Activation::kIdentity);
  nets_.critic1.initialize(init);
  nets_.critic2 = Mlp(critic_sizes, Activation::kIdentity);
  nets_.critic2.initialize(init);
  nets_.actor_target = nets_.actor;
  nets_.critic1_target = nets_.critic1;
  nets_.critic2_target = nets_.critic2;
}

Action Td3Agent::explore(const Observation& obs) {
  if (steps_ < cfg_.warmup_steps) {
    Action a;
    for (double& x : a) x = uniform(explore_rng_, -1.0, 1.0);
    return a;
  }
  return td3_select_action(nets_.actor, obs, cfg_.exploration_noise_std,
                           explore_rng_);
}

Action Td3Agent::act(const Observation& obs) const {
  return to_action(nets_.actor.forward(to_column(obs)));
}

void Td3Agent::observe(const Transition& t, bool) {
  buffer_.push(t);
  ++steps_;
  report_.updated = false;
  if (steps_ < cfg_.warmup_steps ||
      buffer_.size() < static_cast<std::size_t>(cfg_.batch_size)) {
    return;
  }
  for (int k = 0; k < cfg_.updates_per_step; ++k) {
    report_ = update(buffer_.sample_batch(
        sample_rng_, static_cast<std::size_t>(cfg_.batch_size),
        cfg_.reward_scale));
    if (!report_.finite()) break;
  }
}

LossReport Td3Agent::update(const TransitionBatch& b) {
  LossReport rep;
  rep.updated = true;
  const auto n = b.states.cols();

  MatrixF noise(kActDim, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (int k = 0; k < kActDim; ++k) {
      noise(k, c) = static_cast<float>(
          std::clamp(cfg_.target_noise_std * standard_normal(sample_rng_),
                     -cfg_.target_noise_clip, cfg_.target_noise_clip));
    }
  }
  const MatrixF next_action =
      (nets_.actor_target.forward(b.next_states) + noise)
          .cwiseMax(-1.0f)
          .cwiseMin(1.0f);
  const MatrixF next_input = concat_rows(b.next_states, next_action);
  const MatrixF y = td3_critic_target(
      b.rewards, b.not_done, nets_.critic1_target.forward(next_input),
      nets_.critic2_target.forward(next_input), cfg_.gamma);

  const MatrixF input = concat_rows(b.states, b.actions);
  rep.critic_loss = 0.5 * (critic_step(nets_.critic1, critic1_opt_, input, y) +
                           critic_step(nets_.critic2, critic2_opt_, input, y));

  ++updates_;
  if (updates_ % cfg_.policy_delay == 0) {
    nets_.actor.zero_grads();
    const MatrixF pi = nets_.actor.forward_cached(b.states);
    const MatrixF& q = nets_.critic1.forward_cached(concat_rows(b.states, pi));
    rep.actor_loss = -q.cast<double>().mean();
    const MatrixF upstream =
        MatrixF::Constant(1, n, -1.0f / static_cast<float>(n));
    const MatrixF dinput = nets_.critic1.backward(upstream);
    nets_.critic1.zero_grads();
    nets_.actor.backward(dinput.bottomRows(kActDim));
    actor_opt_.step(nets_.actor.parameter_blocks());
    rep.actor_updated = true;

    polyak_update(nets_.actor_target, nets_.actor, cfg_.tau);
    polyak_update(nets_.critic1_target, nets_.critic1, cfg_.tau);
    polyak_update(nets_.critic2_target, nets_.critic2, cfg_.tau);
  }
  return rep;
}

void Td3Agent::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_mlp(dir / "actor.bin", nets_.actor);
  save_mlp(dir / "critic1.bin", nets_.critic1);
  save_mlp(dir / "critic2.bin", nets_.critic2);
  save_mlp(dir / "actor_target.bin", nets_.actor_target);
  save_mlp(dir / "critic1_target.bin", nets_.critic1_target);
  save_mlp(dir / "critic2_target.bin", nets_.critic2_target);
}

void Td3Agent::load(const std::filesystem::path& dir) {
  nets_.actor = load_mlp(dir / "actor.bin", Activation::kTanh);
  nets_.critic1 = load_mlp(dir / "critic1.bin", Activation::kIdentity);
  nets_.critic2 = load_mlp(dir / "critic2.bin", Activation::kIdentity);
  nets_.actor_target = load_mlp(dir / "actor_target.bin", Activation::kTanh);
  nets_.critic1_target =
      load_mlp(dir / "critic1_target.bin", Activation::kIdentity);
  nets_.critic2_target =
      load_mlp(dir / "critic2_target.bin", Activation::kIdentity);
}

Policy Td3Agent::policy() const { return Policy("td3", nets_.actor); }

}  // namespace dockrl
