#include "dockrl/config.hpp"

#include <fstream>
#include <numbers>

#include "dockrl/errors.hpp"

namespace dockrl {

using nlohmann::json;

json to_json(const RunConfig& c) {
  const HydroParams& d = c.dynamics;
  const RewardWeights& w = c.reward.weights;
  const DockGeometry& g = c.reward.geometry;
  const AgentConfig& a = c.agent;
  const HarnessConfig& h = c.harness;
  json j;
  j["dynamics"] = {{"m", d.m},           {"Iz", d.Iz},       {"Xu_dot", d.Xu_dot},
                   {"Yv_dot", d.Yv_dot}, {"Nr_dot", d.Nr_dot}, {"Xu", d.Xu},
                   {"Yv", d.Yv},         {"Nr", d.Nr},       {"Xuu", d.Xuu},
                   {"Yvv", d.Yvv},       {"Nrr", d.Nrr},     {"k_t", d.k_t},
                   {"n_max", d.n_max},   {"L1", d.L1},       {"L2", d.L2},
                   {"L3", d.L3},         {"tau_n", d.tau_n}, {"u_max", d.u_max},
                   {"v_max", d.v_max},   {"r_max", d.r_max}};
  j["env"] = {{"workspace_half_extent", c.env.workspace_half_extent},
              {"spawn_inner", c.env.spawn_inner},
              {"spawn_outer", c.env.spawn_outer},
              {"max_steps", c.env.max_steps},
              {"dt", c.env.dt},
              {"scale_observations", c.env.scale_observations},
              {"obs_scaling", c.env.obs_scaling}};
  j["reward"] = {{"kind", c.reward_kind},
                 {"w_d_inside", w.w_d_inside},
                 {"w_d_outside", w.w_d_outside},
                 {"w_th", w.w_th},
                 {"w_psi", w.w_psi},
                 {"w_y", w.w_y},
                 {"swap_distance_weights", c.reward.swap_distance_weights},
                 {"goal_x", g.goal.x},
                 {"goal_y", g.goal.y},
                 {"goal_psi", g.goal.psi},
                 {"axis_angle", g.axis_angle},
                 {"triangle_half_angle", g.triangle_half_angle},
                 {"triangle_length", g.triangle_length},
                 {"apex_offset", g.apex_offset},
                 {"goal_pos_tol", g.goal_pos_tol},
                 {"goal_yaw_tol", g.goal_yaw_tol},
                 {"r_goal", c.reward.terminal.r_goal},
                 {"r_violation", c.reward.terminal.r_violation}};
  j["agent"] = {{"algo", a.algo},
                {"hidden_sizes", a.hidden_sizes},
                {"gamma", a.gamma},
                {"tau", a.tau},
                {"batch_size", a.batch_size},
                {"buffer_capacity", a.buffer_capacity},
                {"warmup_steps", a.warmup_steps},
                {"updates_per_step", a.updates_per_step},
                {"reward_scale", a.reward_scale},
                {"final_layer_scale", a.final_layer_scale},
                {"td3_lr", a.td3_lr},
                {"exploration_noise_std", a.exploration_noise_std},
                {"target_noise_std", a.target_noise_std},
                {"target_noise_clip", a.target_noise_clip},
                {"policy_delay", a.policy_delay},
                {"sac_lr", a.sac_lr},
                {"sac_initial_alpha", a.sac_initial_alpha},
                {"sac_target_entropy", a.sac_target_entropy},
                {"ppo_lr", a.ppo_lr},
                {"ppo_clip", a.ppo_clip},
                {"gae_lambda", a.gae_lambda},
                {"rollout_length", a.rollout_length},
                {"epochs_per_rollout", a.epochs_per_rollout},
                {"minibatch_size", a.minibatch_size},
                {"ent_coef", a.ent_coef},
                {"max_grad_norm", a.max_grad_norm},
                {"ppo_initial_log_std", a.ppo_initial_log_std}};
  j["harness"] = {{"seed", h.seed},
                  {"total_timesteps", h.total_timesteps},
                  {"checkpoint_interval", h.checkpoint_interval},
                  {"eval_runs", h.eval_runs},
                  {"eval_episodes", h.eval_episodes},
                  {"eval_seed", h.eval_seed},
                  {"curve_window", h.curve_window}};
  return j;
}

namespace {

// Overlays src onto dst; every key in src must already exist in dst.
void merge_strict(json& dst, const json& src, const std::string& prefix) {
  if (!src.is_object()) {
    throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  }
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!dst.contains(it.key())) throw ConfigError(key, "unknown key");
    json& slot = dst[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

class Fields {
 public:
  Fields(const json& root, std::string section)
      : node_(root.at(section)), section_(std::move(section)) {}

  template <typename T>
  void get(const char* name, T& out) const {
    const std::string key = section_ + "." + name;
    try {
      const json& v = node_.at(name);
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(key, "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() &&
              v.get<long long>() < 0) {
            throw ConfigError(key, "expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(key, "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(key, "expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key, std::string("invalid value (") + e.what() + ")");
    }
  }

 private:
  const json& node_;
  std::string section_;
};

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  json merged = to_json(RunConfig{});
  merge_strict(merged, doc, "");

  RunConfig c;
  {
    Fields f(merged, "dynamics");
    HydroParams& d = c.dynamics;
    f.get("m", d.m);
    f.get("Iz", d.Iz);
    f.get("Xu_dot", d.Xu_dot);
    f.get("Yv_dot", d.Yv_dot);
    f.get("Nr_dot", d.Nr_dot);
    f.get("Xu", d.Xu);
    f.get("Yv", d.Yv);
    f.get("Nr", d.Nr);
    f.get("Xuu", d.Xuu);
    f.get("Yvv", d.Yvv);
    f.get("Nrr", d.Nrr);
    f.get("k_t", d.k_t);
    f.get("n_max", d.n_max);
    f.get("L1", d.L1);
    f.get("L2", d.L2);
    f.get("L3", d.L3);
    f.get("tau_n", d.tau_n);
    f.get("u_max", d.u_max);
    f.get("v_max", d.v_max);
    f.get("r_max", d.r_max);
  }
  {
    Fields f(merged, "env");
    f.get("workspace_half_extent", c.env.workspace_half_extent);
    f.get("spawn_inner", c.env.spawn_inner);
    f.get("spawn_outer", c.env.spawn_outer);
    f.get("max_steps", c.env.max_steps);
    f.get("dt", c.env.dt);
    f.get("scale_observations", c.env.scale_observations);
    std::vector<double> scaling;
    f.get("obs_scaling", scaling);
    check(scaling.size() == kObsDim, "env.obs_scaling", "expected 9 divisors");
    std::copy(scaling.begin(), scaling.end(), c.env.obs_scaling.begin());
  }
  {
    Fields f(merged, "reward");
    RewardWeights& w = c.reward.weights;
    DockGeometry& g = c.reward.geometry;
    f.get("kind", c.reward_kind);
    f.get("w_d_inside", w.w_d_inside);
    f.get("w_d_outside", w.w_d_outside);
    std::vector<double> w_th;
    f.get("w_th", w_th);
    check(w_th.size() == 3, "reward.w_th", "expected 3 weights");
    std::copy(w_th.begin(), w_th.end(), w.w_th.begin());
    f.get("w_psi", w.w_psi);
    f.get("w_y", w.w_y);
    f.get("swap_distance_weights", c.reward.swap_distance_weights);
    f.get("goal_x", g.goal.x);
    f.get("goal_y", g.goal.y);
    f.get("goal_psi", g.goal.psi);
    f.get("axis_angle", g.axis_angle);
    f.get("triangle_half_angle", g.triangle_half_angle);
    f.get("triangle_length", g.triangle_length);
    f.get("apex_offset", g.apex_offset);
    f.get("goal_pos_tol", g.goal_pos_tol);
    f.get("goal_yaw_tol", g.goal_yaw_tol);
    f.get("r_goal", c.reward.terminal.r_goal);
    f.get("r_violation", c.reward.terminal.r_violation);
  }
  {
    Fields f(merged, "agent");
    AgentConfig& a = c.agent;
    f.get("algo", a.algo);
    f.get("hidden_sizes", a.hidden_sizes);
    f.get("gamma", a.gamma);
    f.get("tau", a.tau);
    f.get("batch_size", a.batch_size);
    f.get("buffer_capacity", a.buffer_capacity);
    f.get("warmup_steps", a.warmup_steps);
    f.get("updates_per_step", a.updates_per_step);
    f.get("reward_scale", a.reward_scale);
    f.get("final_layer_scale", a.final_layer_scale);
    f.get("td3_lr", a.td3_lr);
    f.get("exploration_noise_std", a.exploration_noise_std);
    f.get("target_noise_std", a.target_noise_std);
    f.get("target_noise_clip", a.target_noise_clip);
    f.get("policy_delay", a.policy_delay);
    f.get("sac_lr", a.sac_lr);
    f.get("sac_initial_alpha", a.sac_initial_alpha);
    f.get("sac_target_entropy", a.sac_target_entropy);
    f.get("ppo_lr", a.ppo_lr);
    f.get("ppo_clip", a.ppo_clip);
    f.get("gae_lambda", a.gae_lambda);
    f.get("rollout_length", a.rollout_length);
    f.get("epochs_per_rollout", a.epochs_per_rollout);
    f.get("minibatch_size", a.minibatch_size);
    f.get("ent_coef", a.ent_coef);
    f.get("max_grad_norm", a.max_grad_norm);
    f.get("ppo_initial_log_std", a.ppo_initial_log_std);
  }
  {
    Fields f(merged, "harness");
    HarnessConfig& h = c.harness;
    f.get("seed", h.seed);
    f.get("total_timesteps", h.total_timesteps);
    f.get("checkpoint_interval", h.checkpoint_interval);
    f.get("eval_runs", h.eval_runs);
    f.get("eval_episodes", h.eval_episodes);
    f.get("eval_seed", h.eval_seed);
    f.get("curve_window", h.curve_window);
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  const HydroParams& d = c.dynamics;
  check(d.m > 0, "dynamics.m", "must be > 0");
  check(d.Iz > 0, "dynamics.Iz", "must be > 0");
  check(d.Xu_dot <= 0, "dynamics.Xu_dot", "must be <= 0");
  check(d.Yv_dot <= 0, "dynamics.Yv_dot", "must be <= 0");
  check(d.Nr_dot <= 0, "dynamics.Nr_dot", "must be <= 0");
  check(d.Xu >= 0, "dynamics.Xu", "must be >= 0");
  check(d.Yv >= 0, "dynamics.Yv", "must be >= 0");
  check(d.Nr >= 0, "dynamics.Nr", "must be >= 0");
  check(d.Xuu >= 0, "dynamics.Xuu", "must be >= 0");
  check(d.Yvv >= 0, "dynamics.Yvv", "must be >= 0");
  check(d.Nrr >= 0, "dynamics.Nrr", "must be >= 0");
  check(d.k_t > 0, "dynamics.k_t", "must be > 0");
  check(d.n_max > 0, "dynamics.n_max", "must be > 0");
  check(d.tau_n > 0, "dynamics.tau_n", "must be > 0");
  check(d.u_max > 0, "dynamics.u_max", "must be > 0");
  check(d.v_max > 0, "dynamics.v_max", "must be > 0");
  check(d.r_max > 0, "dynamics.r_max", "must be > 0");

  const EnvConfig& e = c.env;
  check(e.spawn_inner > 0, "env.spawn_inner", "must be > 0");
  check(e.spawn_inner < e.spawn_outer, "env.spawn_inner",
        "must be < env.spawn_outer");
  check(e.spawn_outer <= e.workspace_half_extent, "env.spawn_outer",
        "must be <= env.workspace_half_extent");
  check(e.max_steps >= 1, "env.max_steps", "must be >= 1");
  check(e.dt > 0, "env.dt", "must be > 0");
  for (double s : e.obs_scaling) check(s > 0, "env.obs_scaling", "entries must be > 0");

  const RewardWeights& w = c.reward.weights;
  const DockGeometry& g = c.reward.geometry;
  check(w.w_d_inside >= 0, "reward.w_d_inside", "must be >= 0");
  check(w.w_d_outside >= 0, "reward.w_d_outside", "must be >= 0");
  for (double x : w.w_th) check(x >= 0, "reward.w_th", "entries must be >= 0");
  check(w.w_psi >= 0, "reward.w_psi", "must be >= 0");
  check(w.w_y >= 0, "reward.w_y", "must be >= 0");
  check(g.triangle_half_angle > 0 && g.triangle_half_angle < std::numbers::pi / 2,
        "reward.triangle_half_angle", "must be in (0, pi/2)");
  check(g.triangle_length > 0, "reward.triangle_length", "must be > 0");
  check(g.apex_offset >= 0, "reward.apex_offset", "must be >= 0");
  check(g.goal_pos_tol > 0, "reward.goal_pos_tol", "must be > 0");
  check(g.goal_yaw_tol > 0, "reward.goal_yaw_tol", "must be > 0");
  check(c.reward.terminal.r_goal > 0, "reward.r_goal", "must be > 0");
  check(c.reward.terminal.r_violation < 0, "reward.r_violation", "must be < 0");
  bool known_kind = false;
  for (const auto& n : reward_model_names()) known_kind |= (n == c.reward_kind);
  check(known_kind, "reward.kind", "unknown reward kind '" + c.reward_kind + "'");

  try {
    validate(c.agent);
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    const auto colon = msg.find(':');
    throw ConfigError(msg.substr(0, colon),
                      colon == std::string::npos ? msg : msg.substr(colon + 2));
  }

  const HarnessConfig& h = c.harness;
  check(h.total_timesteps >= 0, "harness.total_timesteps", "must be >= 0");
  check(h.checkpoint_interval >= 1, "harness.checkpoint_interval", "must be >= 1");
  check(h.eval_runs >= 1, "harness.eval_runs", "must be >= 1");
  check(h.eval_episodes >= 1, "harness.eval_episodes", "must be >= 1");
  check(h.curve_window >= 1, "harness.curve_window", "must be >= 1");
}

RunConfig apply_overrides(const RunConfig& base,
                          const std::vector<std::string>& assignments) {
  json doc = to_json(base);
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError(a, "override must look like key=value");
    }
    const std::string key = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
      const auto dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (!node->is_object() || !node->contains(part)) {
        throw ConfigError(key, "unknown key");
      }
      node = &(*node)[part];
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    if (node->is_object()) throw ConfigError(key, "cannot assign a whole section");
    *node = value;
  }
  return config_from_json(doc);
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& assignments) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw ConfigError("--config", path.string() + " is not valid JSON");
  }
  return apply_overrides(config_from_json(doc), assignments);
}

void write_resolved_config(const std::filesystem::path& path,
                           const RunConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(cfg).dump(2) << "\n";
}

}  // namespace dockrl
