#include "dockrl/sac.hpp"

#include <algorithm>
#include <cmath>

namespace dockrl {
namespace {

using Gaussian = SquashedGaussian<float>;

MatrixF concat_rows(const MatrixF& top, const MatrixF& bottom) {
  MatrixF out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

MatrixF clamp_log_std(const MatrixF& raw) {
  return raw.cwiseMax(static_cast<float>(kLogStdMin))
      .cwiseMin(static_cast<float>(kLogStdMax));
}

MatrixF normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  MatrixF z(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      z(r, c) = static_cast<float>(standard_normal(rng));
    }
  }
  return z;
}

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

std::pair<Action, double> sac_select_action(const Mlp& actor,
                                            const Observation& state, Rng& rng,
                                            bool deterministic) {
  const MatrixF out = actor.forward(to_column(state));
  const MatrixF mean = out.topRows(kActDim);
  const MatrixF log_std = clamp_log_std(out.bottomRows(kActDim));
  const MatrixF z = deterministic ? MatrixF::Zero(kActDim, 1)
                                  : normal_matrix(rng, kActDim, 1);
  const MatrixF a = Gaussian::pre_squash(mean, log_std, z).array().tanh();
  return {to_action(a), Gaussian::log_prob(mean, log_std, z)(0, 0)};
}

MatrixF sac_critic_target(const MatrixF& rewards, const MatrixF& not_done,
                          const MatrixF& q1_next, const MatrixF& q2_next,
                          const MatrixF& log_prob_next, double alpha,
                          double gamma) {
  const MatrixF soft =
      q1_next.cwiseMin(q2_next) - static_cast<float>(alpha) * log_prob_next;
  return rewards +
         (static_cast<float>(gamma) * not_done.array() * soft.array()).matrix();
}

double sac_log_alpha_grad(const MatrixF& log_prob, double target_entropy) {
  return -log_prob.cast<double>().mean() - target_entropy;
}

SacAgent::SacAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      actor_opt_(AdamConfig{cfg.sac_lr}),
      critic1_opt_(AdamConfig{cfg.sac_lr}),
      critic2_opt_(AdamConfig{cfg.sac_lr}),
      alpha_opt_(AdamConfig{cfg.sac_lr}),
      log_alpha_(std::log(cfg.sac_initial_alpha)),
      buffer_(static_cast<std::size_t>(cfg.buffer_capacity)),
      explore_rng_(make_rng(seed, Stream::kExploration)),
      sample_rng_(make_rng(seed, Stream::kSampling)) {
  validate(cfg_);
  Rng init = make_rng(seed, Stream::kInit);
  nets_.actor = Mlp(layer_sizes(kObsDim, cfg.hidden_sizes, 2 * kActDim),
                    Activation::kIdentity);
  nets_.actor.initialize(init, cfg.final_layer_scale);
  const auto critic_sizes =
      layer_sizes(kObsDim + kActDim, cfg.hidden_sizes, 1);
  nets_.critic1 = Mlp(critic_sizes, Activation::kIdentity);
  nets_.critic1.initialize(init);
  nets_.critic2 = Mlp(critic_sizes, Activation::kIdentity);
  nets_.critic2.initialize(init);
  nets_.critic1_target = nets_.critic1;
  nets_.critic2_target = nets_.critic2;
}

Action SacAgent::explore(const Observation& obs) {
  if (steps_ < cfg_.warmup_steps) {
    Action a;
    for (double& x : a) x = uniform(explore_rng_, -1.0, 1.0);
    return a;
  }
  return sac_select_action(nets_.actor, obs, explore_rng_, false).first;
}

Action SacAgent::act(const Observation& obs) const {
  const MatrixF out = nets_.actor.forward(to_column(obs));
  return to_action(out.topRows(kActDim).array().tanh());
}

void SacAgent::observe(const Transition& t, bool) {
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

LossReport SacAgent::update(const TransitionBatch& b) {
  LossReport rep;
  rep.updated = true;
  rep.actor_updated = true;
  const auto n = b.states.cols();
  const double alpha = std::exp(log_alpha_);

  // Critic targets with a freshly sampled next action.
  {
    const MatrixF out = nets_.actor.forward(b.next_states);
    const MatrixF mean = out.topRows(kActDim);
    const MatrixF log_std = clamp_log_std(out.bottomRows(kActDim));
    const MatrixF z = normal_matrix(sample_rng_, kActDim, n);
    const MatrixF next_action =
        Gaussian::pre_squash(mean, log_std, z).array().tanh();
    const MatrixF logp = Gaussian::log_prob(mean, log_std, z);
    const MatrixF next_input = concat_rows(b.next_states, next_action);
    const MatrixF y = sac_critic_target(
        b.rewards, b.not_done, nets_.critic1_target.forward(next_input),
        nets_.critic2_target.forward(next_input), logp, alpha, cfg_.gamma);
    const MatrixF input = concat_rows(b.states, b.actions);
    rep.critic_loss =
        0.5 * (critic_step(nets_.critic1, critic1_opt_, input, y) +
               critic_step(nets_.critic2, critic2_opt_, input, y));
  }

  // Actor through the reparameterized sample and the pessimistic critic.
  nets_.actor.zero_grads();
  const MatrixF out = nets_.actor.forward_cached(b.states);
  const MatrixF mean = out.topRows(kActDim);
  const MatrixF raw_log_std = out.bottomRows(kActDim);
  const MatrixF log_std = clamp_log_std(raw_log_std);
  const MatrixF z = normal_matrix(sample_rng_, kActDim, n);
  const MatrixF action = Gaussian::pre_squash(mean, log_std, z).array().tanh();
  const MatrixF logp = Gaussian::log_prob(mean, log_std, z);

  const MatrixF input = concat_rows(b.states, action);
  const MatrixF q1 = nets_.critic1.forward_cached(input);
  const MatrixF q2 = nets_.critic2.forward_cached(input);
  MatrixF pick1(1, n), pick2(1, n);
  double q_min_sum = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const bool first = q1(0, c) <= q2(0, c);
    pick1(0, c) = first ? 1.0f : 0.0f;
    pick2(0, c) = first ? 0.0f : 1.0f;
    q_min_sum += first ? q1(0, c) : q2(0, c);
  }
  const MatrixF dq_da = nets_.critic1.backward(pick1).bottomRows(kActDim) +
                        nets_.critic2.backward(pick2).bottomRows(kActDim);
  nets_.critic1.zero_grads();
  nets_.critic2.zero_grads();

  auto [d_mean, d_log_std] = Gaussian::actor_grad(
      mean, log_std, z, dq_da, static_cast<float>(alpha),
      1.0f / static_cast<float>(n));
  for (Eigen::Index c = 0; c < n; ++c) {
    for (int i = 0; i < kActDim; ++i) {
      const float raw = raw_log_std(i, c);
      if (raw < kLogStdMin || raw > kLogStdMax) d_log_std(i, c) = 0.0f;
    }
  }
  MatrixF upstream(2 * kActDim, n);
  upstream << d_mean, d_log_std;
  nets_.actor.backward(upstream);
  actor_opt_.step(nets_.actor.parameter_blocks());

  const double mean_logp = logp.cast<double>().mean();
  rep.actor_loss = alpha * mean_logp - q_min_sum / static_cast<double>(n);
  rep.entropy = -mean_logp;

  // Temperature.
  log_alpha_grad_ = sac_log_alpha_grad(logp, cfg_.sac_target_entropy);
  const ParamBlock<double> block{&log_alpha_, &log_alpha_grad_, 1};
  alpha_opt_.step(std::span<const ParamBlock<double>>(&block, 1));
  rep.alpha = std::exp(log_alpha_);

  polyak_update(nets_.critic1_target, nets_.critic1, cfg_.tau);
  polyak_update(nets_.critic2_target, nets_.critic2, cfg_.tau);
  return rep;
}

void SacAgent::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_mlp(dir / "actor.bin", nets_.actor);
  save_mlp(dir / "critic1.bin", nets_.critic1);
  save_mlp(dir / "critic2.bin", nets_.critic2);
  save_mlp(dir / "critic1_target.bin", nets_.critic1_target);
  save_mlp(dir / "critic2_target.bin", nets_.critic2_target);
  CheckpointLayer la{1, 0, {}, {static_cast<float>(log_alpha_)}};
  write_checkpoint(dir / "log_alpha.bin", {la});
}

void SacAgent::load(const std::filesystem::path& dir) {
  nets_.actor = load_mlp(dir / "actor.bin", Activation::kIdentity);
  nets_.critic1 = load_mlp(dir / "critic1.bin", Activation::kIdentity);
  nets_.critic2 = load_mlp(dir / "critic2.bin", Activation::kIdentity);
  nets_.critic1_target =
      load_mlp(dir / "critic1_target.bin", Activation::kIdentity);
  nets_.critic2_target =
      load_mlp(dir / "critic2_target.bin", Activation::kIdentity);
  const auto la = read_checkpoint(dir / "log_alpha.bin");
  log_alpha_ = la.at(0).bias.at(0);
}

Policy SacAgent::policy() const { return Policy("sac", nets_.actor); }

}  // namespace dockrl
