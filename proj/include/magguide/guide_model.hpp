#pragma once

#include <vector>

#include "magguide/params.hpp"

namespace magguide {

// (-1)^n for any integer, including negatives.
[[nodiscard]] constexpr int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

// Indexes the family of steady periodic orbits (spin angles theta = k*pi,
// nu = (2m+1)*pi/2).
struct BranchIndex {
  int k = 1;
  int m = 0;
};

// (-1)^(k+m), the sign of the steady Z envelope.
[[nodiscard]] constexpr int branch_sign(BranchIndex b) { return parity_sign(b.k + b.m); }

// Modulated guide field in the transverse plane [T].
struct FieldSample {
  double Bx;
  double Bz;
};

// Bx = b*z*cos(w t) + phase*B_b*sin(w t), Bz = b*x*cos(w t). Total function.
[[nodiscard]] FieldSample field_at(double gradient_T_per_m, double bias_T, double phase_rad,
                                   double x_m, double z_m, double t_s, double omega_rad_s);

// Dimensionless trajectory state. Positions in pitch units, time tau = w*t.
struct NonlinearState {
  double tau = 0.0;
  double X = 0.0;
  double Vx = 0.0;
  double Z = 0.0;
  double Vz = 0.0;
  double nx = 1.0;  // magnetic moment direction, |n| = 1
  double ny = 0.0;
  double nz = 0.0;
};

struct NonlinearDeriv {
  double dX, dVx, dZ, dVz, dnx, dny, dnz;
};

// Full nonlinear spin-motion dynamics:
//   X'' = -a1 nz cos(tau),  Z'' = -a1 nx cos(tau),
//   nx' = -a2 ny X cos(tau),
//   ny' = -a2 (nz Z - nx X) cos(tau) - a3 nz sin(tau),
//   nz' =  a2 ny Z cos(tau) + a3 ny sin(tau).
// Conserves |n| exactly along the flow.
[[nodiscard]] NonlinearDeriv nonlinear_rhs(const NonlinearState& s, const AlphaParams& a);

struct Trajectory {
  std::vector<NonlinearState> samples;  // includes initial and final state
  bool diverged = false;
  double divergence_tau = 0.0;  // tau of the first bad step, valid when diverged
};

// Fixed-step classical RK4 over `periods` modulation periods. Divergence
// (|component| > 1e12 or non-finite) truncates the trajectory and is reported
// as data, not as an error: blow-up is the physics of unstable regions.
[[nodiscard]] Trajectory integrate_nonlinear(const NonlinearState& s0, const AlphaParams& a,
                                             double periods, int steps_per_period,
                                             bool renormalize_spin = false);

// Slow-envelope state: X = Xc cos(tau) + Xs sin(tau), same for Z, and spin
// angles n = (cos(theta)sin(nu), sin(theta)sin(nu), cos(nu)).
struct EnvelopeState {
  double tau = 0.0;
  double Xc = 0.0;
  double Xs = 0.0;
  double Zc = 0.0;
  double Zs = 0.0;
  double theta = 0.0;
  double nu = 0.0;
};

struct EnvelopeDeriv {
  double dXc, dXs, dZc, dZs, dtheta, dnu;
};

// First-order envelope dynamics. The theta equation carries cot(nu); states
// with |sin(nu)| < 1e-12 raise invalid_parameter (coordinate pole).
[[nodiscard]] EnvelopeDeriv envelope_rhs(const EnvelopeState& e, const AlphaParams& a);

// Fixed-step RK4 for the envelope system, validation use only.
[[nodiscard]] std::vector<EnvelopeState> integrate_envelope(const EnvelopeState& e0,
                                                            const AlphaParams& a, double periods,
                                                            int steps_per_period);

// Reconstructs the trajectory state implied by an envelope state.
[[nodiscard]] NonlinearState envelope_to_nonlinear(const EnvelopeState& e, const AlphaParams& a);

// Steady periodic orbit of the envelope system; an exact solution of the full
// nonlinear dynamics as well.
struct SteadyOrbit {
  BranchIndex branch;
  double Zc;     // (-1)^(k+m) * alpha1
  double theta;  // k*pi
  double nu;     // (2m+1)*pi/2

  // Equivalent trajectory state at tau = 0:
  // X=0, Vx=0, Z=Zc, Vz=0, n=((-1)^(k+m), 0, 0).
  [[nodiscard]] NonlinearState initial_state() const;

  // Exact orbit at any tau: Z = Zc cos(tau), Vz = -Zc sin(tau), n fixed.
  [[nodiscard]] NonlinearState analytic_state(double tau) const;

  [[nodiscard]] EnvelopeState envelope_state(double tau = 0.0) const;
};

[[nodiscard]] SteadyOrbit steady_orbit(BranchIndex branch, const AlphaParams& a);

}  // namespace magguide
