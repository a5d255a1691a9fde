#ifndef DOCKRL_DYNAMICS_HPP_
#define DOCKRL_DYNAMICS_HPP_

// Planar (surge, sway, yaw) rigid-body model of a small AUV with one surge
// thruster and two lateral thrusters.  Body velocities follow the SNAME
// convention; positions live in a north-east frame.

namespace dockrl {

// Wraps an angle to [-pi, pi).  Throws DomainError on non-finite input.
double wrap_angle(double a);

struct Pose2D {
  double x = 0.0;    // north, m
  double y = 0.0;    // east, m
  double psi = 0.0;  // yaw, rad in [-pi, pi)
};

struct BodyVelocity {
  double u = 0.0;  // surge, m/s
  double v = 0.0;  // sway, m/s
  double r = 0.0;  // yaw rate, rad/s
};

// Normalized rotational speeds, 1.0 corresponds to HydroParams::n_max.
struct ThrusterState {
  double n1 = 0.0;  // surge thruster
  double n2 = 0.0;  // forward lateral thruster
  double n3 = 0.0;  // aft lateral thruster
};

ThrusterState clamp_thrusters(const ThrusterState& n);

// Added-mass terms use the negative sign convention (Xu_dot < 0).  Damping
// coefficients are positive magnitudes; the damping force opposes motion.
struct HydroParams {
  double m = 60.0;
  double Iz = 8.0;
  double Xu_dot = -12.0;  // 20 % of m
  double Yv_dot = -36.0;  // 60 % of m
  double Nr_dot = -2.4;   // 30 % of Iz
  double Xu = 15.0;
  double Yv = 40.0;
  double Nr = 10.0;
  double Xuu = 10.0;
  double Yvv = 60.0;
  double Nrr = 15.0;
  double k_t = 0.004;    // N / (rad/s)^2, k_t * n_max^2 = 40 N
  double n_max = 100.0;  // rad/s
  double L1 = 0.0;
  double L2 = 0.5;
  double L3 = -0.5;
  double tau_n = 0.3;  // s
  double u_max = 2.0;
  double v_max = 1.0;
  double r_max = 1.0;
};

// Throws DomainError naming the first violated constraint.
void validate(const HydroParams& p);

struct Wrench {
  double X = 0.0;
  double Y = 0.0;
  double N = 0.0;
};

Wrench allocate(const ThrusterState& thruster, const HydroParams& params);

struct DynamicsState {
  Pose2D pose;
  BodyVelocity vel;
  ThrusterState thr;
};

// One semi-implicit Euler step: first-order thruster lag, body acceleration
// from (M_RB + M_A) nu_dot = tau - C(nu) nu - D(nu) nu, then the pose is
// advanced with the updated body velocity.  Throws SimulationDiverged if the
// result is not finite.
DynamicsState step_dynamics(const DynamicsState& state,
                            const ThrusterState& cmd, const HydroParams& params,
                            double dt);

// 1/2 (m u^2 + m v^2 + Iz r^2) using rigid-body inertia only.
double kinetic_energy_surrogate(const BodyVelocity& vel,
                                const HydroParams& params);

}  // namespace dockrl

#endif  // DOCKRL_DYNAMICS_HPP_
