#include "dockrl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "dockrl/errors.hpp"

namespace dockrl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double signed_square(double n) { return n * std::abs(n); }

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("dynamics: ") + what);
}

}  // namespace

double wrap_angle(double a) {
  if (!std::isfinite(a)) throw DomainError("wrap_angle: non-finite angle");
  if (a >= -kPi && a < kPi) return a;
  double w = std::fmod(a + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift back due to rounding.
  if (w >= kPi) w -= kTwoPi;
  return w;
}

ThrusterState clamp_thrusters(const ThrusterState& n) {
  return {std::clamp(n.n1, -1.0, 1.0), std::clamp(n.n2, -1.0, 1.0),
          std::clamp(n.n3, -1.0, 1.0)};
}

void validate(const HydroParams& p) {
  require(p.m > 0.0, "m must be > 0");
  require(p.Iz > 0.0, "Iz must be > 0");
  require(p.Xu_dot <= 0.0 && p.Yv_dot <= 0.0 && p.Nr_dot <= 0.0,
          "added mass terms must be <= 0");
  require(p.Xu >= 0.0 && p.Yv >= 0.0 && p.Nr >= 0.0,
          "linear damping must be >= 0");
  require(p.Xuu >= 0.0 && p.Yvv >= 0.0 && p.Nrr >= 0.0,
          "quadratic damping must be >= 0");
  require(p.k_t > 0.0 && p.n_max > 0.0, "k_t and n_max must be > 0");
  require(p.tau_n > 0.0, "tau_n must be > 0");
  require(p.u_max > 0.0 && p.v_max > 0.0 && p.r_max > 0.0,
          "speed caps must be > 0");
}

Wrench allocate(const ThrusterState& thruster, const HydroParams& params) {
  const double scale = params.k_t * params.n_max * params.n_max;
  const double f1 = scale * signed_square(thruster.n1);
  const double f2 = scale * signed_square(thruster.n2);
  const double f3 = scale * signed_square(thruster.n3);
  return {f1, f2 + f3, params.L1 * f1 + params.L2 * f2 + params.L3 * f3};
}

DynamicsState step_dynamics(const DynamicsState& state,
                            const ThrusterState& cmd, const HydroParams& params,
                            double dt) {
  if (!(dt > 0.0)) throw DomainError("step_dynamics: dt must be > 0");

  const double lag = dt / params.tau_n;
  const ThrusterState& n = state.thr;
  const ThrusterState thr = clamp_thrusters({n.n1 + lag * (cmd.n1 - n.n1),
                                             n.n2 + lag * (cmd.n2 - n.n2),
                                             n.n3 + lag * (cmd.n3 - n.n3)});
  const Wrench tau = allocate(thr, params);

  const double m11 = params.m - params.Xu_dot;
  const double m22 = params.m - params.Yv_dot;
  const double m33 = params.Iz - params.Nr_dot;
  const auto [u, v, r] = state.vel;

  // C(nu) nu for diagonal total inertia.
  const double cx = -m22 * v * r;
  const double cy = m11 * u * r;
  const double cn = (m22 - m11) * u * v;

  const double dx = (params.Xu + params.Xuu * std::abs(u)) * u;
  const double dy = (params.Yv + params.Yvv * std::abs(v)) * v;
  const double dn = (params.Nr + params.Nrr * std::abs(r)) * r;

  BodyVelocity vel{u + dt * (tau.X - cx - dx) / m11,
                   v + dt * (tau.Y - cy - dy) / m22,
                   r + dt * (tau.N - cn - dn) / m33};
  vel.u = std::clamp(vel.u, -params.u_max, params.u_max);
  vel.v = std::clamp(vel.v, -params.v_max, params.v_max);
  vel.r = std::clamp(vel.r, -params.r_max, params.r_max);

  const Pose2D& p = state.pose;
  const double c = std::cos(p.psi);
  const double s = std::sin(p.psi);
  const double x = p.x + dt * (c * vel.u - s * vel.v);
  const double y = p.y + dt * (s * vel.u + c * vel.v);
  const double psi = p.psi + dt * vel.r;

  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(psi) ||
      !std::isfinite(vel.u) || !std::isfinite(vel.v) || !std::isfinite(vel.r)) {
    std::ostringstream msg;
    msg << "simulation diverged from state x=" << p.x << " y=" << p.y
        << " psi=" << p.psi << " u=" << u << " v=" << v << " r=" << r
        << " cmd=(" << cmd.n1 << "," << cmd.n2 << "," << cmd.n3 << ")";
    throw SimulationDiverged(msg.str());
  }
  return {{x, y, wrap_angle(psi)}, vel, thr};
}

double kinetic_energy_surrogate(const BodyVelocity& vel,
                                const HydroParams& params) {
  return 0.5 * (params.m * vel.u * vel.u + params.m * vel.v * vel.v +
                params.Iz * vel.r * vel.r);
}

}  // namespace dockrl
