#include "magguide/guide_model.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "magguide/errors.hpp"

namespace magguide {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double divergence_limit = 1e12;

// X, Vx, Z, Vz, nx, ny, nz
using State7 = std::array<double, 7>;
// Xc, Xs, Zc, Zs, theta, nu
using State6 = std::array<double, 6>;

State7 rhs(double tau, const State7& y, const AlphaParams& a) {
  const double c = std::cos(tau);
  const double s = std::sin(tau);
  const double X = y[0], Vx = y[1], Z = y[2], Vz = y[3];
  const double nx = y[4], ny = y[5], nz = y[6];
  return State7{
      Vx,
      -a.alpha1 * nz * c,
      Vz,
      -a.alpha1 * nx * c,
      -a.alpha2 * ny * X * c,
      -a.alpha2 * (nz * Z - nx * X) * c - a.alpha3 * nz * s,
      a.alpha2 * ny * Z * c + a.alpha3 * ny * s,
  };
}

State6 rhs(double tau, const State6& y, const AlphaParams& a) {
  EnvelopeState e{.tau = tau, .Xc = y[0], .Xs = y[1], .Zc = y[2], .Zs = y[3],
                  .theta = y[4], .nu = y[5]};
  const EnvelopeDeriv d = envelope_rhs(e, a);
  return State6{d.dXc, d.dXs, d.dZc, d.dZs, d.dtheta, d.dnu};
}

template <class State>
State rk4_step(double tau, const State& y, double h, const AlphaParams& a) {
  const State k1 = rhs(tau, y, a);
  State tmp;
  for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  const State k2 = rhs(tau + 0.5 * h, tmp, a);
  for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  const State k3 = rhs(tau + 0.5 * h, tmp, a);
  for (size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
  const State k4 = rhs(tau + h, tmp, a);
  State out;
  for (size_t i = 0; i < y.size(); ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

template <class State>
bool state_bad(const State& y) {
  for (double v : y)
    if (!std::isfinite(v) || std::abs(v) > divergence_limit) return true;
  return false;
}

}  // namespace

FieldSample field_at(double gradient_T_per_m, double bias_T, double phase_rad, double x_m,
                     double z_m, double t_s, double omega_rad_s) {
  const double c = std::cos(omega_rad_s * t_s);
  const double s = std::sin(omega_rad_s * t_s);
  return FieldSample{
      .Bx = gradient_T_per_m * z_m * c + phase_rad * bias_T * s,
      .Bz = gradient_T_per_m * x_m * c,
  };
}

NonlinearDeriv nonlinear_rhs(const NonlinearState& s, const AlphaParams& a) {
  const State7 d = rhs(s.tau, State7{s.X, s.Vx, s.Z, s.Vz, s.nx, s.ny, s.nz}, a);
  return NonlinearDeriv{d[0], d[1], d[2], d[3], d[4], d[5], d[6]};
}

Trajectory integrate_nonlinear(const NonlinearState& s0, const AlphaParams& a, double periods,
                               int steps_per_period, bool renormalize_spin) {
  a.validate();
  if (steps_per_period < 64) throw invalid_parameter("need at least 64 steps per period");
  if (!(periods > 0.0) || !std::isfinite(periods))
    throw invalid_parameter("period count must be positive");

  const double h = two_pi / steps_per_period;
  const auto n_steps = static_cast<long>(std::llround(periods * steps_per_period));
  if (n_steps < 1) throw invalid_parameter("duration shorter than one step");

  Trajectory traj;
  traj.samples.reserve(static_cast<size_t>(n_steps) + 1);
  traj.samples.push_back(s0);

  State7 y{s0.X, s0.Vx, s0.Z, s0.Vz, s0.nx, s0.ny, s0.nz};
  for (long i = 0; i < n_steps; ++i) {
    const double tau = s0.tau + static_cast<double>(i) * h;
    y = rk4_step(tau, y, h, a);
    if (state_bad(y)) {
      traj.diverged = true;
      traj.divergence_tau = s0.tau + static_cast<double>(i + 1) * h;
      return traj;
    }
    if (renormalize_spin) {
      const double norm = std::sqrt(y[4] * y[4] + y[5] * y[5] + y[6] * y[6]);
      if (norm > 0.0) {
        y[4] /= norm;
        y[5] /= norm;
        y[6] /= norm;
      }
    }
    traj.samples.push_back(NonlinearState{.tau = s0.tau + static_cast<double>(i + 1) * h,
                                          .X = y[0], .Vx = y[1], .Z = y[2], .Vz = y[3],
                                          .nx = y[4], .ny = y[5], .nz = y[6]});
  }
  return traj;
}

EnvelopeDeriv envelope_rhs(const EnvelopeState& e, const AlphaParams& a) {
  const double sn = std::sin(e.nu);
  if (std::abs(sn) < 1e-12)
    throw singular_coordinate("spin-angle chart pole: sin(nu) ~ 0");
  const double cn = std::cos(e.nu);
  const double ct = std::cos(e.theta);
  const double st = std::sin(e.theta);
  const double c = std::cos(e.tau);
  const double s = std::sin(e.tau);
  const double cc = c * c;
  const double sc = s * c;
  // shared drive of both spin angles
  const double drive = a.alpha2 * (e.Zc * cc + e.Zs * sc) + a.alpha3 * s;
  return EnvelopeDeriv{
      .dXc = -0.5 * e.Xs,
      .dXs = 0.5 * e.Xc - 0.5 * a.alpha1 * cn,
      .dZc = -0.5 * e.Zs,
      .dZs = 0.5 * e.Zc - 0.5 * a.alpha1 * ct * sn,
      .dtheta = -ct * (cn / sn) * drive + a.alpha2 * (e.Xc * cc + e.Xs * sc),
      .dnu = -st * drive,
  };
}

std::vector<EnvelopeState> integrate_envelope(const EnvelopeState& e0, const AlphaParams& a,
                                              double periods, int steps_per_period) {
  a.validate();
  if (steps_per_period < 64) throw invalid_parameter("need at least 64 steps per period");
  if (!(periods > 0.0) || !std::isfinite(periods))
    throw invalid_parameter("period count must be positive");

  const double h = two_pi / steps_per_period;
  const auto n_steps = static_cast<long>(std::llround(periods * steps_per_period));

  std::vector<EnvelopeState> out;
  out.reserve(static_cast<size_t>(n_steps) + 1);
  out.push_back(e0);
  State6 y{e0.Xc, e0.Xs, e0.Zc, e0.Zs, e0.theta, e0.nu};
  for (long i = 0; i < n_steps; ++i) {
    const double tau = e0.tau + static_cast<double>(i) * h;
    y = rk4_step(tau, y, h, a);
    out.push_back(EnvelopeState{.tau = e0.tau + static_cast<double>(i + 1) * h,
                                .Xc = y[0], .Xs = y[1], .Zc = y[2], .Zs = y[3],
                                .theta = y[4], .nu = y[5]});
  }
  return out;
}

NonlinearState envelope_to_nonlinear(const EnvelopeState& e, const AlphaParams& a) {
  const EnvelopeDeriv d = envelope_rhs(e, a);
  const double c = std::cos(e.tau);
  const double s = std::sin(e.tau);
  const double sn = std::sin(e.nu);
  return NonlinearState{
      .tau = e.tau,
      .X = e.Xc * c + e.Xs * s,
      .Vx = (d.dXc + e.Xs) * c + (d.dXs - e.Xc) * s,
      .Z = e.Zc * c + e.Zs * s,
      .Vz = (d.dZc + e.Zs) * c + (d.dZs - e.Zc) * s,
      .nx = std::cos(e.theta) * sn,
      .ny = std::sin(e.theta) * sn,
      .nz = std::cos(e.nu),
  };
}

NonlinearState SteadyOrbit::initial_state() const { return analytic_state(0.0); }

NonlinearState SteadyOrbit::analytic_state(double tau) const {
  const double sign = branch_sign(branch);
  return NonlinearState{
      .tau = tau,
      .X = 0.0,
      .Vx = 0.0,
      .Z = Zc * std::cos(tau),
      .Vz = -Zc * std::sin(tau),
      .nx = sign,
      .ny = 0.0,
      .nz = 0.0,
  };
}

EnvelopeState SteadyOrbit::envelope_state(double tau) const {
  return EnvelopeState{.tau = tau, .Xc = 0.0, .Xs = 0.0, .Zc = Zc, .Zs = 0.0,
                       .theta = theta, .nu = nu};
}

SteadyOrbit steady_orbit(BranchIndex branch, const AlphaParams& a) {
  a.validate();
  return SteadyOrbit{
      .branch = branch,
      .Zc = branch_sign(branch) * a.alpha1,
      .theta = branch.k * std::numbers::pi,
      .nu = (2 * branch.m + 1) * std::numbers::pi / 2.0,
  };
}

}  // namespace magguide
