#include "dockrl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dockrl/errors.hpp"

namespace dockrl {
namespace {

constexpr double kSize = 600.0;
constexpr double kMargin = 40.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// World (north x, east y) to page coordinates.
struct Frame {
  double half_extent;
  double scale() const { return (kSize - 2 * kMargin) / (2 * half_extent); }
  double px(double east) const { return kSize / 2 + east * scale(); }
  double py(double north) const { return kSize / 2 - north * scale(); }
  std::string point(double north, double east) const {
    return num(px(east)) + "," + num(py(north));
  }
};

}  // namespace

const char* outcome_color(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::kGoal:
      return "#2ca02c";
    case TerminalKind::kViolation:
      return "#d62728";
    case TerminalKind::kTimeout:
      return "#ff7f0e";
    case TerminalKind::kNone:
      break;
  }
  return "#7f7f7f";
}

std::string plot_trajectories(const std::vector<EpisodeRecord>& records,
                              const DockGeometry& geom, const EnvConfig& env) {
  if (records.empty()) throw UsageError("plot_trajectories: no episodes");
  const Frame f{env.workspace_half_extent};
  const double w = env.workspace_half_extent;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<rect class=\"workspace\" x=\"" << num(f.px(-w)) << "\" y=\""
      << num(f.py(w)) << "\" width=\"" << num(2 * w * f.scale())
      << "\" height=\"" << num(2 * w * f.scale())
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Docking triangle: apex behind the goal by apex_offset, far edge at
  // triangle_length along the axis.
  const double ca = std::cos(geom.axis_angle);
  const double sa = std::sin(geom.axis_angle);
  const double reach = geom.triangle_length + geom.apex_offset;
  const double half_width = reach * std::tan(geom.triangle_half_angle);
  const double apex_x = geom.goal.x - ca * geom.apex_offset;
  const double apex_y = geom.goal.y - sa * geom.apex_offset;
  auto corner = [&](double along, double across) {
    return f.point(apex_x + ca * along - sa * across,
                   apex_y + sa * along + ca * across);
  };
  svg << "<polygon class=\"dock-triangle\" points=\"" << corner(0, 0) << " "
      << corner(reach, half_width) << " " << corner(reach, -half_width)
      << "\" fill=\"#1f77b4\" fill-opacity=\"0.1\" stroke=\"#1f77b4\"/>\n";
  svg << "<circle class=\"goal-tolerance\" cx=\"" << num(f.px(geom.goal.y))
      << "\" cy=\"" << num(f.py(geom.goal.x)) << "\" r=\""
      << num(geom.goal_pos_tol * f.scale())
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (const auto& rec : records) {
    svg << "<polyline class=\"trajectory outcome-" << to_string(rec.outcome)
        << "\" fill=\"none\" stroke=\"" << outcome_color(rec.outcome)
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rec.rows.size(); ++i) {
      if (i) svg << " ";
      svg << f.point(rec.rows[i].state.pose.x, rec.rows[i].state.pose.y);
    }
    svg << "\"/>\n";
    const Pose2D& s = rec.rows.front().state.pose;
    svg << "<circle class=\"start\" cx=\"" << num(f.px(s.y)) << "\" cy=\""
        << num(f.py(s.x)) << "\" r=\"3\" fill=\"" << outcome_color(rec.outcome)
        << "\"/>\n";
  }
  svg << "<text x=\"" << num(kSize / 2) << "\" y=\"" << num(kMargin / 2)
      << "\" text-anchor=\"middle\" font-size=\"12\">x (north) up, y (east) "
         "right</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string plot_learning_curve(const std::vector<CurveRow>& rows, int window) {
  if (rows.empty()) throw UsageError("plot_learning_curve: no episodes");
  std::vector<double> returns;
  for (const auto& r : rows) returns.push_back(r.episode_return);
  const std::vector<double> smooth = trailing_mean(returns, window);

  const double x_max = static_cast<double>(std::max(rows.back().global_step, 1L));
  auto [lo_it, hi_it] = std::minmax_element(returns.begin(), returns.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto px = [&](double step) {
    return kMargin + (kSize - 2 * kMargin) * step / x_max;
  };
  auto py = [&](double v) {
    return kSize - kMargin - (kSize - 2 * kMargin) * (v - lo) / (hi - lo);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<polyline class=\"raw\" fill=\"none\" stroke=\"#c7c7c7\" points=\"";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) svg << " ";
    svg << num(px(rows[i].global_step)) << "," << num(py(returns[i]));
  }
  svg << "\"/>\n";
  svg << "<polyline class=\"trailing-mean\" fill=\"none\" stroke=\"#1f77b4\" "
         "stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) svg << " ";
    svg << num(px(rows[i].global_step)) << "," << num(py(smooth[i]));
  }
  svg << "\"/>\n";
  svg << "<text x=\"" << num(kSize / 2) << "\" y=\"" << num(kSize - 8)
      << "\" text-anchor=\"middle\" font-size=\"12\">global step</text>\n";
  svg << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kMargin / 2)
      << "\" font-size=\"12\">episode return (trailing mean of " << window
      << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dockrl
