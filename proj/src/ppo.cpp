#include "dockrl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dockrl/errors.hpp"

namespace dockrl {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

GaeResult gae(const std::vector<RolloutStep>& rollout, double gamma,
              double lambda) {
  const std::size_t n = rollout.size();
  GaeResult out{std::vector<double>(n), std::vector<double>(n)};
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const RolloutStep& s = rollout[k];
    const double bootstrap = s.terminal ? 0.0 : gamma * s.next_value;
    const double delta = s.reward + bootstrap - s.value;
    const double carry = (s.terminal || s.episode_end) ? 0.0 : next_adv;
    out.advantages[k] = delta + gamma * lambda * carry;
    out.returns[k] = out.advantages[k] + s.value;
    next_adv = out.advantages[k];
  }
  return out;
}

std::vector<double> normalize_advantages(const std::vector<double>& adv) {
  if (adv.empty()) return {};
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double std = std::sqrt(var / n);
  std::vector<double> out(adv.size());
  for (std::size_t i = 0; i < adv.size(); ++i) {
    out[i] = (adv[i] - mean) / (std + 1e-8);
  }
  return out;
}

double ppo_clipped_objective(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

double ppo_objective_grad(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return ratio * advantage <= clipped * advantage ? ratio * advantage : 0.0;
}

double gaussian_log_prob(const Action& action, const Action& mean,
                         const Action& log_std) {
  double s = 0.0;
  for (int i = 0; i < kActDim; ++i) {
    const double z = (action[i] - mean[i]) / std::exp(log_std[i]);
    s += -0.5 * z * z - log_std[i] - kHalfLog2Pi;
  }
  return s;
}

PpoAgent::PpoAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      log_std_(Eigen::VectorXf::Constant(
          kActDim, static_cast<float>(cfg.ppo_initial_log_std))),
      log_std_grad_(Eigen::VectorXf::Zero(kActDim)),
      policy_opt_(AdamConfig{cfg.ppo_lr}),
      value_opt_(AdamConfig{cfg.ppo_lr}),
      explore_rng_(make_rng(seed, Stream::kExploration)),
      sample_rng_(make_rng(seed, Stream::kSampling)) {
  validate(cfg_);
  Rng init = make_rng(seed, Stream::kInit);
  policy_ = Mlp(layer_sizes(kObsDim, cfg.hidden_sizes, kActDim),
                Activation::kIdentity);
  policy_.initialize(init, cfg.final_layer_scale);
  value_ = Mlp(layer_sizes(kObsDim, cfg.hidden_sizes, 1), Activation::kIdentity);
  value_.initialize(init);
  rollout_.reserve(static_cast<std::size_t>(cfg.rollout_length));
}

Action PpoAgent::log_std() const {
  return {log_std_(0), log_std_(1), log_std_(2)};
}

double PpoAgent::value_of(const Observation& obs) const {
  return value_.forward(to_column(obs))(0, 0);
}

Action PpoAgent::explore(const Observation& obs) {
  const Action mean = to_action(policy_.forward(to_column(obs)));
  const Action ls = log_std();
  Action a;
  for (int i = 0; i < kActDim; ++i) {
    a[i] = mean[i] + std::exp(ls[i]) * standard_normal(explore_rng_);
  }
  // Stored log-probabilities must match what update() recomputes in float.
  for (double& x : a) x = static_cast<float>(x);
  pending_log_prob_ = gaussian_log_prob(a, mean, ls);
  pending_value_ = value_of(obs);
  return a;
}

Action PpoAgent::act(const Observation& obs) const {
  Action a = to_action(policy_.forward(to_column(obs)));
  for (double& x : a) x = std::clamp(x, -1.0, 1.0);
  return a;
}

void PpoAgent::observe(const Transition& t, bool episode_end) {
  RolloutStep s;
  s.state = t.state;
  s.action = t.action;
  s.log_prob = pending_log_prob_;
  s.value = pending_value_;
  s.reward = t.reward * cfg_.reward_scale;
  s.terminal = t.terminal;
  s.episode_end = episode_end || t.terminal;
  s.next_value = t.terminal ? 0.0 : value_of(t.next_state);
  rollout_.push_back(s);
  report_.updated = false;
  if (rollout_.size() >= static_cast<std::size_t>(cfg_.rollout_length)) {
    report_ = update(rollout_);
    rollout_.clear();
  }
}

LossReport PpoAgent::update(const std::vector<RolloutStep>& rollout) {
  LossReport rep;
  rep.updated = true;
  rep.actor_updated = true;
  const GaeResult g = gae(rollout, cfg_.gamma, cfg_.gae_lambda);
  const std::vector<double> adv = normalize_advantages(g.advantages);
  const auto total = static_cast<Eigen::Index>(rollout.size());

  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto mb = static_cast<Eigen::Index>(cfg_.minibatch_size);

  double policy_loss_sum = 0.0;
  double value_loss_sum = 0.0;
  long minibatches = 0;
  for (int epoch = 0; epoch < cfg_.epochs_per_rollout; ++epoch) {
    std::shuffle(order.begin(), order.end(), sample_rng_);
    for (Eigen::Index start = 0; start < total; start += mb) {
      const Eigen::Index n = std::min(mb, total - start);
      MatrixF states(kObsDim, n), actions(kActDim, n), returns(1, n);
      for (Eigen::Index c = 0; c < n; ++c) {
        const RolloutStep& s = rollout[order[start + c]];
        for (int k = 0; k < kObsDim; ++k) states(k, c) = static_cast<float>(s.state[k]);
        for (int k = 0; k < kActDim; ++k) actions(k, c) = static_cast<float>(s.action[k]);
        returns(0, c) = static_cast<float>(g.returns[order[start + c]]);
      }

      // Policy.
      policy_.zero_grads();
      log_std_grad_.setZero();
      const MatrixF mean = policy_.forward_cached(states);
      MatrixF d_mean(kActDim, n);
      Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(kActDim);
      double objective = 0.0;
      double max_dev = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) {
        const std::size_t idx = static_cast<std::size_t>(order[start + c]);
        double logp = 0.0;
        for (int i = 0; i < kActDim; ++i) {
          const double sigma = std::exp(static_cast<double>(log_std_(i)));
          const double z =
              (static_cast<double>(actions(i, c)) - mean(i, c)) / sigma;
          logp += -0.5 * z * z - log_std_(i) - kHalfLog2Pi;
        }
        const double ratio = std::exp(logp - rollout[idx].log_prob);
        max_dev = std::max(max_dev, std::abs(ratio - 1.0));
        objective += ppo_clipped_objective(ratio, adv[idx], cfg_.ppo_clip);
        // Loss is -mean(objective).
        const double dlogp =
            -ppo_objective_grad(ratio, adv[idx], cfg_.ppo_clip) /
            static_cast<double>(n);
        for (int i = 0; i < kActDim; ++i) {
          const double var = std::exp(2.0 * static_cast<double>(log_std_(i)));
          const double diff = static_cast<double>(actions(i, c)) - mean(i, c);
          d_mean(i, c) = static_cast<float>(dlogp * diff / var);
          d_log_std(i) += dlogp * (diff * diff / var - 1.0);
        }
      }
      if (epoch == 0 && start == 0) first_ratio_dev_ = max_dev;
      for (int i = 0; i < kActDim; ++i) {
        log_std_grad_(i) = static_cast<float>(d_log_std(i) - cfg_.ent_coef);
      }
      policy_.backward(d_mean);
      auto blocks = policy_.parameter_blocks();
      blocks.push_back({log_std_.data(), log_std_grad_.data(),
                        static_cast<std::size_t>(kActDim)});
      clip_grad_norm<float>(blocks, cfg_.max_grad_norm);
      policy_opt_.step(blocks);
      policy_loss_sum += -objective / static_cast<double>(n);

      // Value.
      value_.zero_grads();
      const MatrixF& v = value_.forward_cached(states);
      const MatrixF diff = v - returns;
      value_loss_sum += diff.cast<double>().squaredNorm() / static_cast<double>(n);
      value_.backward(diff * (2.0f / static_cast<float>(n)));
      auto vblocks = value_.parameter_blocks();
      clip_grad_norm<float>(vblocks, cfg_.max_grad_norm);
      value_opt_.step(vblocks);
      ++minibatches;
    }
  }
  if (minibatches > 0) {
    rep.actor_loss = policy_loss_sum / static_cast<double>(minibatches);
    rep.critic_loss = value_loss_sum / static_cast<double>(minibatches);
  }
  double entropy = 0.0;
  for (int i = 0; i < kActDim; ++i) entropy += log_std_(i) + 0.5 + kHalfLog2Pi;
  rep.entropy = entropy;
  return rep;
}

void PpoAgent::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  save_mlp(dir / "actor.bin", policy_);
  save_mlp(dir / "value.bin", value_);
  CheckpointLayer ls{static_cast<std::uint32_t>(kActDim), 0, {},
                     {log_std_(0), log_std_(1), log_std_(2)}};
  write_checkpoint(dir / "log_std.bin", {ls});
}

void PpoAgent::load(const std::filesystem::path& dir) {
  policy_ = load_mlp(dir / "actor.bin", Activation::kIdentity);
  value_ = load_mlp(dir / "value.bin", Activation::kIdentity);
  const auto ls = read_checkpoint(dir / "log_std.bin");
  if (ls.size() != 1 || ls[0].bias.size() != static_cast<std::size_t>(kActDim)) {
    throw FormatError("checkpoint field 'layer[0].rows' of log_std.bin must be 3");
  }
  for (int i = 0; i < kActDim; ++i) log_std_(i) = ls[0].bias[i];
}

Policy PpoAgent::policy() const { return Policy("ppo", policy_); }

}  // namespace dockrl
