#ifndef DOCKRL_HARNESS_HPP_
#define DOCKRL_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dockrl/agent.hpp"
#include "dockrl/config.hpp"

namespace dockrl {

// One row of a trajectory CSV.  Row 0 is the spawn state with a zero action
// and zero reward; row t >= 1 holds the state after step t, the action that
// produced it and the reward received.
struct TrajectoryRow {
  int t = 0;
  AuvState state;
  Action action{};
  double reward = 0.0;
  bool in_triangle = false;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  int run = 0;
  int episode = 0;
  AuvState initial_state;
  std::vector<TrajectoryRow> rows;
  TerminalKind outcome = TerminalKind::kNone;
  double episode_return = 0.0;
  int steps = 0;
};

struct EvalSummary {
  double mean_return = 0.0;
  double std_return = 0.0;  // population std over all episodes
  std::optional<double> mean_steps_to_goal;  // Goal episodes only
  int success_count = 0;
  int episode_count = 0;
};

EvalSummary summarize(const std::vector<EpisodeRecord>& records);

// Spawn seed for evaluation episode (run, episode).
std::uint64_t eval_spawn_seed(std::uint64_t master, int run, int episode);

using PolicyFn = std::function<Action(const Observation&)>;

// Runs one episode from the seeded spawn with a deterministic policy.
EpisodeRecord run_episode(const RunConfig& cfg, const PolicyFn& policy,
                          std::uint64_t spawn_seed);

struct EvalResult {
  EvalSummary summary;
  std::vector<EpisodeRecord> records;  // (run, episode) order
};

EvalResult evaluate(const PolicyFn& policy, const RunConfig& cfg, int n_runs,
                    int n_episodes);

struct CurveRow {
  long global_step = 0;
  long episode = 0;
  double episode_return = 0.0;
  int steps = 0;
  TerminalKind outcome = TerminalKind::kNone;
};

struct TrainResult {
  std::vector<CurveRow> curve;
  std::filesystem::path final_checkpoint;
};

// Observer for progress reporting; called after every finished episode.
using EpisodeCallback = std::function<void(const CurveRow&)>;

// Writes resolved_config.json, learning_curve.csv, train.log and
// checkpoints/{step_N,final}/ under out_dir.  Throws IoError before any
// training if out_dir is not writable and TrainingDiverged (after writing
// checkpoints/diagnostic) on a non-finite loss.
TrainResult train(const RunConfig& cfg, const std::filesystem::path& out_dir,
                  const EpisodeCallback& on_episode = {});

// --- file formats ----------------------------------------------------------

std::string format_number(double v);

extern const char* const kTrajectoryHeader;
extern const char* const kCurveHeader;

void write_trajectory_csv(const std::filesystem::path& path,
                          const EpisodeRecord& record);
// Outcome and return are recomputed from the rows; the final row is
// classified with the given config.
EpisodeRecord read_trajectory_csv(const std::filesystem::path& path,
                                  const RunConfig& cfg);

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curve_csv(const std::filesystem::path& path);

nlohmann::json summary_to_json(const EvalSummary& s);
void write_summary_json(const std::filesystem::path& path,
                        const EvalSummary& s);

// Trailing mean over the last `window` entries (fewer at the start).
std::vector<double> trailing_mean(const std::vector<double>& values,
                                  int window);

}  // namespace dockrl

#endif  // DOCKRL_HARNESS_HPP_
