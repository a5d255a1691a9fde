#include "dockrl/agent.hpp"

#include <algorithm>
#include <cmath>

#include "dockrl/errors.hpp"
#include "dockrl/ppo.hpp"
#include "dockrl/sac.hpp"
#include "dockrl/td3.hpp"

namespace dockrl {

void validate(const AgentConfig& c) {
  auto fail = [](const std::string& field, const std::string& what) {
    throw DomainError("agent." + field + ": " + what);
  };
  if (c.algo != "td3" && c.algo != "sac" && c.algo != "ppo") {
    fail("algo", "must be one of td3, sac, ppo");
  }
  if (c.hidden_sizes.empty()) fail("hidden_sizes", "must not be empty");
  for (int h : c.hidden_sizes) {
    if (h <= 0) fail("hidden_sizes", "entries must be > 0");
  }
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) fail("gamma", "must be in (0, 1)");
  if (!(c.tau > 0.0 && c.tau <= 1.0)) fail("tau", "must be in (0, 1]");
  if (c.batch_size < 1) fail("batch_size", "must be >= 1");
  if (c.buffer_capacity < c.batch_size) {
    fail("buffer_capacity", "must be >= batch_size");
  }
  if (c.warmup_steps < 0) fail("warmup_steps", "must be >= 0");
  if (!(c.reward_scale > 0.0)) fail("reward_scale", "must be > 0");
  if (!(c.final_layer_scale > 0.0)) fail("final_layer_scale", "must be > 0");
  if (!(c.td3_lr > 0.0)) fail("td3_lr", "must be > 0");
  if (!(c.sac_lr > 0.0)) fail("sac_lr", "must be > 0");
  if (!(c.ppo_lr > 0.0)) fail("ppo_lr", "must be > 0");
  if (c.exploration_noise_std < 0.0) fail("exploration_noise_std", "must be >= 0");
  if (c.target_noise_std < 0.0) fail("target_noise_std", "must be >= 0");
  if (c.target_noise_clip < 0.0) fail("target_noise_clip", "must be >= 0");
  if (c.policy_delay < 1) fail("policy_delay", "must be >= 1");
  if (c.updates_per_step < 1) fail("updates_per_step", "must be >= 1");
  if (!(c.sac_initial_alpha > 0.0)) fail("sac_initial_alpha", "must be > 0");
  if (!(c.ppo_clip > 0.0)) fail("ppo_clip", "must be > 0");
  if (!(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0)) {
    fail("gae_lambda", "must be in [0, 1]");
  }
  if (c.rollout_length < 1) fail("rollout_length", "must be >= 1");
  if (c.epochs_per_rollout < 1) fail("epochs_per_rollout", "must be >= 1");
  if (c.minibatch_size < 1) fail("minibatch_size", "must be >= 1");
  if (c.ent_coef < 0.0) fail("ent_coef", "must be >= 0");
  if (!(c.max_grad_norm > 0.0)) fail("max_grad_norm", "must be > 0");
}

bool LossReport::finite() const {
  return std::isfinite(critic_loss) && std::isfinite(actor_loss) &&
         std::isfinite(alpha) && std::isfinite(entropy);
}

MatrixF to_column(const Observation& obs) {
  MatrixF m(kObsDim, 1);
  for (int i = 0; i < kObsDim; ++i) m(i, 0) = static_cast<float>(obs[i]);
  return m;
}

Action to_action(const MatrixF& column) {
  if (column.rows() < kActDim || column.cols() != 1) {
    throw DomainError("to_action: expected a column with >= 3 rows");
  }
  return {column(0, 0), column(1, 0), column(2, 0)};
}

std::vector<int> layer_sizes(int input, const std::vector<int>& hidden,
                             int output) {
  std::vector<int> s{input};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(output);
  return s;
}

Policy::Policy(std::string algo, Mlp actor)
    : algo_(std::move(algo)), actor_(std::move(actor)) {
  const int expected = algo_ == "sac" ? 2 * kActDim : kActDim;
  if (actor_.input_size() != kObsDim || actor_.output_size() != expected) {
    throw FormatError("actor for '" + algo_ + "' must map " +
                      std::to_string(kObsDim) + " inputs to " +
                      std::to_string(expected) + " outputs");
  }
}

Action Policy::act(const Observation& obs) const {
  const MatrixF out = actor_.forward(to_column(obs));
  Action a = algo_ == "sac" ? to_action(out.topRows(kActDim).array().tanh())
                            : to_action(out);
  for (double& x : a) x = std::clamp(x, -1.0, 1.0);
  return a;
}

Policy load_policy(const std::string& algo, const std::filesystem::path& path) {
  const auto file =
      std::filesystem::is_directory(path) ? path / "actor.bin" : path;
  const Activation out = algo == "td3" ? Activation::kTanh : Activation::kIdentity;
  return Policy(algo, load_mlp(file, out));
}

std::unique_ptr<Agent> make_agent(const AgentConfig& cfg, std::uint64_t seed) {
  if (cfg.algo == "td3") return std::make_unique<Td3Agent>(cfg, seed);
  if (cfg.algo == "sac") return std::make_unique<SacAgent>(cfg, seed);
  if (cfg.algo == "ppo") return std::make_unique<PpoAgent>(cfg, seed);
  throw DomainError("agent.algo: unknown algorithm '" + cfg.algo + "'");
}

}  // namespace dockrl
