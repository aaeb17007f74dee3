#pragma once

#include <vector>

#include "magguide/guide_model.hpp"
#include "magguide/params.hpp"

namespace magguide {

// Accumulated rotation angle of the time-varying frame that untwists the
// spin-angle block of the linearized dynamics. Defined by
// angle'(tau) = 1 - spin_coupling_rate(tau), angle(0) = 0; evaluated in
// closed form:
//   tau - (-1)^k [ (-1)^(k+m) a1 a2 (tau/2 + sin(2 tau)/4) + a3 (1 - cos tau) ].
[[nodiscard]] double lyapunov_angle(const AlphaParams& a, BranchIndex branch, double tau);

// Half-period periodicity defect of the frame angle, in closed form:
//   (-1)^k [ (-1)^(k+m) pi a1 a2 / 2 - 2 a3 ] - pi.
// Equals lyapunov_angle(pi) - lyapunov_angle(2 pi) exactly; its zero set is
// the estimated upper bound of the stable domain. Never used as a classifier.
[[nodiscard]] double periodicity_residual(const AlphaParams& a, BranchIndex branch);

// alpha3 on the bound at fixed alpha1*alpha2:
// (-1)^k (pi/2) ((-1)^m a1 a2 / 2 - 1).
[[nodiscard]] double bound_alpha3(double alpha1_alpha2, BranchIndex branch);

struct BoundCurveSample {
  double omega;    // [rad/s]
  double omega_L;  // Larmor frequency on the bound [rad/s]
  AlphaParams alphas;
};

// Estimated upper bound of the stable domain in (omega, omega_L) for one
// branch, plus the threshold frequency below which guiding is unstable for
// any phase offset.
struct BoundCurve {
  BranchIndex branch;
  CharacteristicFrequencies freqs;  // kept for coordinate conversions
  std::vector<BoundCurveSample> samples;  // empty when the range is infeasible
  double threshold_omega;  // cbrt(transverse^2 * rabi / 2) [rad/s]
};

// Samples the bound over [omega_min, omega_max]. For even m the on-axis bound
// only exists at omega >= threshold_omega (the Larmor frequency on the curve
// changes sign there), so the range is clipped; a range entirely below
// threshold yields an empty curve carrying the threshold only.
[[nodiscard]] BoundCurve bound_curve(const CharacteristicFrequencies& freqs, BranchIndex branch,
                                     double omega_min, double omega_max, int n_samples);

// Modulation frequency below which guiding is unstable for any phase offset:
// cbrt(transverse^2 * rabi / 2).
[[nodiscard]] double threshold_omega(const CharacteristicFrequencies& freqs);

// The same threshold expressed as the ratio alpha2/alpha1:
// cbrt(rabi^4 / (2 transverse^4)).
[[nodiscard]] double threshold_alpha_ratio(const CharacteristicFrequencies& freqs);

}  // namespace magguide
