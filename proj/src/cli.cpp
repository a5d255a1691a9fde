#include "dockrl/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "dockrl/config.hpp"
#include "dockrl/errors.hpp"
#include "dockrl/harness.hpp"
#include "dockrl/plot.hpp"

namespace dockrl {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool config_required) {
  auto* c = cmd->add_option("--config", o.config, "JSON run config");
  if (config_required) c->required();
  cmd->add_option("--seed", o.seed, "overrides harness.seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--set", o.sets, "dotted key=value override (repeatable)");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config, o.sets);
  if (o.config.empty() && !o.sets.empty()) cfg = apply_overrides(cfg, o.sets);
  if (o.seed) {
    cfg.harness.seed = *o.seed;
    validate(cfg);
  }
  return cfg;
}

fs::path output_dir(const CommonOptions& o, const RunConfig& cfg) {
  if (!o.out.empty()) return o.out;
  const char* root = std::getenv("DOCKRL_OUT");
  return fs::path(root && *root ? root : "runs") /
         (cfg.agent.algo + "_seed" + std::to_string(cfg.harness.seed));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"AUV docking reinforcement-learning benchmark", "dockrl"};
  app.require_subcommand(1);

  CommonOptions check_opts, train_opts, eval_opts, plot_opts;
  std::string checkpoint;
  std::optional<int> runs, episodes;
  std::vector<std::string> trajectories;
  std::string curve;

  auto* check = app.add_subcommand("check", "validate and print the resolved config");
  add_common(check, check_opts, true);
  auto* train_cmd = app.add_subcommand("train", "train an agent");
  add_common(train_cmd, train_opts, true);
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval_cmd, eval_opts, true);
  eval_cmd->add_option("--checkpoint", checkpoint, "actor file or checkpoint dir")
      ->required();
  eval_cmd->add_option("--runs", runs, "overrides harness.eval_runs");
  eval_cmd->add_option("--episodes", episodes, "overrides harness.eval_episodes");
  auto* plot = app.add_subcommand("plot", "render trajectory or learning-curve SVGs");
  add_common(plot, plot_opts, false);
  plot->add_option("trajectories", trajectories, "trajectory CSV files");
  plot->add_option("--curve", curve, "learning-curve CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error kind=usage key=- msg=" << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*check) {
      const RunConfig cfg = resolve(check_opts);
      out << to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (*train_cmd) {
      const RunConfig cfg = resolve(train_opts);
      const fs::path dir = output_dir(train_opts, cfg);
      const TrainResult r = train(cfg, dir);
      out << "trained " << cfg.agent.algo << " for "
          << cfg.harness.total_timesteps << " steps, " << r.curve.size()
          << " episodes; checkpoint " << r.final_checkpoint.string() << "\n";
      return 0;
    }
    if (*eval_cmd) {
      RunConfig cfg = resolve(eval_opts);
      if (runs) cfg.harness.eval_runs = *runs;
      if (episodes) cfg.harness.eval_episodes = *episodes;
      validate(cfg);
      const Policy policy = load_policy(cfg.agent.algo, checkpoint);
      const EvalResult res =
          evaluate([&](const Observation& o) { return policy.act(o); }, cfg,
                   cfg.harness.eval_runs, cfg.harness.eval_episodes);
      const fs::path dir =
          eval_opts.out.empty() ? output_dir(eval_opts, cfg) / "eval"
                                : fs::path(eval_opts.out);
      fs::create_directories(dir);
      write_resolved_config(dir / "resolved_config.json", cfg);
      for (const auto& rec : res.records) {
        write_trajectory_csv(dir / ("trajectory_run" + std::to_string(rec.run) +
                                    "_ep" + std::to_string(rec.episode) + ".csv"),
                             rec);
      }
      write_summary_json(dir / "summary.json", res.summary);
      write_text(dir / "trajectories.svg",
                 plot_trajectories(res.records, cfg.reward.geometry, cfg.env));
      out << summary_to_json(res.summary).dump() << "\n";
      return 0;
    }
    if (*plot) {
      const RunConfig cfg = resolve(plot_opts);
      if (trajectories.empty() && curve.empty()) {
        throw UsageError("plot needs trajectory CSVs or --curve");
      }
      const fs::path target = plot_opts.out.empty() ? fs::path("plot.svg")
                                                    : fs::path(plot_opts.out);
      if (!curve.empty()) {
        const fs::path curve_out =
            trajectories.empty() ? target
                                 : fs::path(target).replace_extension(".curve.svg");
        write_text(curve_out, plot_learning_curve(read_curve_csv(curve),
                                                  cfg.harness.curve_window));
        out << "wrote " << curve_out.string() << "\n";
      }
      if (!trajectories.empty()) {
        std::vector<EpisodeRecord> records;
        for (const auto& p : trajectories) {
          records.push_back(read_trajectory_csv(p, cfg));
        }
        write_text(target, plot_trajectories(records, cfg.reward.geometry, cfg.env));
        out << "wrote " << target.string() << "\n";
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    const std::string msg = what.substr(std::min(what.size(), e.key().size() + 2));
    err << "error kind=config key=" << e.key() << " msg=" << one_line(msg) << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "error kind=io key=- msg=" << one_line(e.what()) << "\n";
    return 4;
  } catch (const FormatError& e) {
    err << "error kind=format key=- msg=" << one_line(e.what()) << "\n";
    return 5;
  } catch (const UsageError& e) {
    err << "error kind=usage key=- msg=" << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error kind=runtime key=- msg=" << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dockrl
