#ifndef DOCKRL_PLOT_HPP_
#define DOCKRL_PLOT_HPP_

#include <string>
#include <vector>

#include "dockrl/env.hpp"
#include "dockrl/harness.hpp"

namespace dockrl {

// Stroke colour for a trajectory with the given outcome:
//   goal      #2ca02c
//   violation #d62728
//   timeout   #ff7f0e
//   none      #7f7f7f
const char* outcome_color(TerminalKind kind);

// Top-down view with north (+x) pointing up the page and east (+y) to the
// right.  Throws UsageError for an empty record list.
std::string plot_trajectories(const std::vector<EpisodeRecord>& records,
                              const DockGeometry& geom, const EnvConfig& env);

// Raw per-episode returns plus their trailing mean against global step.
std::string plot_learning_curve(const std::vector<CurveRow>& rows, int window);

}  // namespace dockrl

#endif  // DOCKRL_PLOT_HPP_
