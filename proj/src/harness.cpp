#include "dockrl/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dockrl/errors.hpp"

namespace dockrl {

namespace fs = std::filesystem;

const char* const kTrajectoryHeader =
    "t,x,y,psi,u,v,r,n1,n2,n3,action1,action2,action3,reward,in_triangle";
const char* const kCurveHeader =
    "global_step,episode,episode_return,steps,outcome";

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

EvalSummary summarize(const std::vector<EpisodeRecord>& records) {
  EvalSummary s;
  s.episode_count = static_cast<int>(records.size());
  if (records.empty()) return s;
  double sum = 0.0;
  double goal_steps = 0.0;
  for (const auto& r : records) {
    sum += r.episode_return;
    if (r.outcome == TerminalKind::kGoal) {
      ++s.success_count;
      goal_steps += r.steps;
    }
  }
  const double n = static_cast<double>(records.size());
  s.mean_return = sum / n;
  double var = 0.0;
  for (const auto& r : records) {
    var += (r.episode_return - s.mean_return) * (r.episode_return - s.mean_return);
  }
  s.std_return = std::sqrt(var / n);
  if (s.success_count > 0) s.mean_steps_to_goal = goal_steps / s.success_count;
  return s;
}

std::uint64_t eval_spawn_seed(std::uint64_t master, int run, int episode) {
  return derive_seed(master, {static_cast<std::uint64_t>(Stream::kEvaluation),
                              static_cast<std::uint64_t>(run),
                              static_cast<std::uint64_t>(episode)});
}

EpisodeRecord run_episode(const RunConfig& cfg, const PolicyFn& policy,
                          std::uint64_t spawn_seed) {
  DockingEnv env(cfg.env, cfg.dynamics, cfg.reward, cfg.reward_kind);
  Rng rng(spawn_seed);
  Observation obs = env.reset(rng);

  EpisodeRecord rec;
  rec.seed = spawn_seed;
  rec.initial_state = env.state();
  rec.rows.push_back({0, env.state(), {0.0, 0.0, 0.0}, 0.0,
                      in_docking_triangle(env.state().pose, cfg.reward.geometry)});
  while (true) {
    const Action a = policy(obs);
    const StepResult res = env.step(a);
    rec.rows.push_back({res.info.step_index, res.info.raw_state, a, res.reward,
                        res.info.in_triangle});
    rec.episode_return += res.reward;
    obs = res.observation;
    if (res.done()) {
      rec.outcome = res.terminal;
      rec.steps = res.info.step_index;
      break;
    }
  }
  return rec;
}

EvalResult evaluate(const PolicyFn& policy, const RunConfig& cfg, int n_runs,
                    int n_episodes) {
  EvalResult out;
  for (int run = 0; run < n_runs; ++run) {
    for (int ep = 0; ep < n_episodes; ++ep) {
      EpisodeRecord rec = run_episode(
          cfg, policy, eval_spawn_seed(cfg.harness.eval_seed, run, ep));
      rec.run = run;
      rec.episode = ep;
      out.records.push_back(std::move(rec));
    }
  }
  out.summary = summarize(out.records);
  return out;
}

namespace {

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory " + dir.string() + " is not writable");
  }
  fs::remove(probe, ec);
}

std::string curve_line(const CurveRow& r) {
  return std::to_string(r.global_step) + "," + std::to_string(r.episode) + "," +
         format_number(r.episode_return) + "," + std::to_string(r.steps) + "," +
         to_string(r.outcome);
}

}  // namespace

TrainResult train(const RunConfig& cfg, const fs::path& out_dir,
                  const EpisodeCallback& on_episode) {
  validate(cfg);
  ensure_writable_dir(out_dir);
  write_resolved_config(out_dir / "resolved_config.json", cfg);

  std::ofstream curve(out_dir / "learning_curve.csv", std::ios::trunc);
  std::ofstream log(out_dir / "train.log", std::ios::trunc);
  if (!curve || !log) throw IoError("cannot write into " + out_dir.string());
  curve << kCurveHeader << "\n";

  const std::uint64_t seed = cfg.harness.seed;
  DockingEnv env(cfg.env, cfg.dynamics, cfg.reward, cfg.reward_kind);
  Rng env_rng = make_rng(seed, Stream::kEnv);
  std::unique_ptr<Agent> agent = make_agent(cfg.agent, seed);
  const fs::path ckpt_root = out_dir / "checkpoints";

  log << "algo=" << cfg.agent.algo << " seed=" << seed
      << " total_timesteps=" << cfg.harness.total_timesteps << "\n";
  const auto t0 = std::chrono::steady_clock::now();

  TrainResult result;
  Observation obs = env.reset(env_rng);
  double ep_return = 0.0;
  long episode = 0;
  for (long step = 1; step <= cfg.harness.total_timesteps; ++step) {
    const Action a = agent->explore(obs);
    const StepResult res = env.step(a);
    agent->observe({obs, a, res.reward, res.observation, res.terminated()},
                   res.done());
    const LossReport& rep = agent->last_report();
    if (rep.updated && !rep.finite()) {
      agent->save(ckpt_root / "diagnostic");
      log << "non-finite loss at step " << step << " critic=" << rep.critic_loss
          << " actor=" << rep.actor_loss << "\n";
      throw TrainingDiverged("non-finite loss at step " + std::to_string(step) +
                             "; diagnostic checkpoint in " +
                             (ckpt_root / "diagnostic").string());
    }
    ep_return += res.reward;
    if (res.done()) {
      CurveRow row{step, episode, ep_return, res.info.step_index, res.terminal};
      curve << curve_line(row) << "\n";
      result.curve.push_back(row);
      if (on_episode) on_episode(row);
      ++episode;
      ep_return = 0.0;
      obs = env.reset(env_rng);
    } else {
      obs = res.observation;
    }
    if (step % cfg.harness.checkpoint_interval == 0) {
      agent->save(ckpt_root / ("step_" + std::to_string(step)));
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      log << "step " << step << " episodes " << episode << " elapsed_s "
          << secs << "\n";
    }
  }
  result.final_checkpoint = ckpt_root / "final";
  agent->save(result.final_checkpoint);
  log << "done episodes=" << episode << "\n";
  return result;
}

void write_trajectory_csv(const fs::path& path, const EpisodeRecord& rec) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << kTrajectoryHeader << "\n";
  for (const auto& r : rec.rows) {
    const auto& s = r.state;
    const double vals[] = {s.pose.x,  s.pose.y,  s.pose.psi,  s.vel.u,
                           s.vel.v,   s.vel.r,   s.thr.n1,    s.thr.n2,
                           s.thr.n3,  r.action[0], r.action[1], r.action[2],
                           r.reward};
    out << r.t;
    for (double v : vals) out << "," << format_number(v);
    out << "," << (r.in_triangle ? 1 : 0) << "\n";
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(where + ": cannot parse number '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, const std::string& where) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(where + ": cannot parse integer '" + s + "'");
  }
  return v;
}

}  // namespace

EpisodeRecord read_trajectory_csv(const fs::path& path, const RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw FormatError(path.string() + ": unexpected trajectory header");
  }
  EpisodeRecord rec;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (cells.size() != 15) throw FormatError(where + ": expected 15 columns");
    TrajectoryRow r;
    r.t = static_cast<int>(parse_long(cells[0], where));
    double v[13];
    for (int i = 0; i < 13; ++i) v[i] = parse_double(cells[i + 1], where);
    r.state = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}};
    r.action = {v[9], v[10], v[11]};
    r.reward = v[12];
    r.in_triangle = parse_long(cells[14], where) != 0;
    rec.rows.push_back(r);
  }
  if (rec.rows.empty()) throw FormatError(path.string() + ": no rows");
  rec.initial_state = rec.rows.front().state;
  for (std::size_t i = 1; i < rec.rows.size(); ++i) {
    rec.episode_return += rec.rows[i].reward;
  }
  rec.steps = rec.rows.back().t;
  rec.outcome = classify_terminal(rec.rows.back().state, cfg.reward.geometry,
                                  cfg.env, rec.steps);
  return rec;
}

void write_curve_csv(const fs::path& path, const std::vector<CurveRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCurveHeader << "\n";
  for (const auto& r : rows) out << curve_line(r) << "\n";
}

std::vector<CurveRow> read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) {
    throw FormatError(path.string() + ": unexpected learning-curve header");
  }
  std::vector<CurveRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = split(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (c.size() != 5) throw FormatError(where + ": expected 5 columns");
    rows.push_back({parse_long(c[0], where), parse_long(c[1], where),
                    parse_double(c[2], where),
                    static_cast<int>(parse_long(c[3], where)),
                    terminal_kind_from_string(c[4])});
  }
  return rows;
}

nlohmann::json summary_to_json(const EvalSummary& s) {
  nlohmann::json j;
  j["mean_return"] = s.mean_return;
  j["std_return"] = s.std_return;
  j["mean_steps_to_goal"] = s.mean_steps_to_goal
                                ? nlohmann::json(*s.mean_steps_to_goal)
                                : nlohmann::json(nullptr);
  j["success_count"] = s.success_count;
  j["episode_count"] = s.episode_count;
  return j;
}

void write_summary_json(const fs::path& path, const EvalSummary& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << summary_to_json(s).dump(2) << "\n";
}

std::vector<double> trailing_mean(const std::vector<double>& values,
                                  int window) {
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
    const std::size_t n = std::min<std::size_t>(i + 1, window);
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace dockrl
