#include "magguide/bounds.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

#include "magguide/errors.hpp"

namespace magguide {

namespace {
constexpr double pi = std::numbers::pi;
}

double lyapunov_angle(const AlphaParams& a, BranchIndex branch, double tau) {
  const double drive_term = branch_sign(branch) * a.alpha1 * a.alpha2 *
                            (tau / 2.0 + std::sin(2.0 * tau) / 4.0);
  const double larmor_term = a.alpha3 * (1.0 - std::cos(tau));
  return tau - parity_sign(branch.k) * (drive_term + larmor_term);
}

double periodicity_residual(const AlphaParams& a, BranchIndex branch) {
  return parity_sign(branch.k) *
             (branch_sign(branch) * pi * a.alpha1 * a.alpha2 / 2.0 - 2.0 * a.alpha3) -
         pi;
}

double bound_alpha3(double alpha1_alpha2, BranchIndex branch) {
  return parity_sign(branch.k) * (pi / 2.0) *
         (parity_sign(branch.m) * alpha1_alpha2 / 2.0 - 1.0);
}

double threshold_omega(const CharacteristicFrequencies& freqs) {
  return std::cbrt(freqs.transverse * freqs.transverse * freqs.rabi / 2.0);
}

double threshold_alpha_ratio(const CharacteristicFrequencies& freqs) {
  const double t2 = freqs.transverse * freqs.transverse;
  return std::cbrt(freqs.rabi * freqs.rabi * freqs.rabi * freqs.rabi / (2.0 * t2 * t2));
}

BoundCurve bound_curve(const CharacteristicFrequencies& freqs, BranchIndex branch,
                       double omega_min, double omega_max, int n_samples) {
  if (!(freqs.transverse > 0.0) || !(freqs.rabi > 0.0))
    throw invalid_parameter("characteristic frequencies must be positive");
  if (!(omega_min > 0.0) || !(omega_max > omega_min))
    throw invalid_parameter("need 0 < omega_min < omega_max");
  if (n_samples < 2) throw invalid_parameter("need at least 2 curve samples");

  BoundCurve curve{.branch = branch, .freqs = freqs, .samples = {},
                   .threshold_omega = threshold_omega(freqs)};

  // For even m the Larmor frequency on the bound changes sign at the
  // threshold; only the omega >= threshold side bounds the diagram.
  double lo = omega_min;
  if (branch.m % 2 == 0) lo = std::max(lo, curve.threshold_omega);
  if (!(lo < omega_max)) return curve;  // threshold-only result

  const double t2r = freqs.transverse * freqs.transverse * freqs.rabi;
  curve.samples.reserve(static_cast<size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double w = lo + (omega_max - lo) * static_cast<double>(i) / (n_samples - 1);
    const double wL = parity_sign(branch.k) * (pi / 2.0) *
                      (parity_sign(branch.m) * t2r / (2.0 * w * w) - w);
    if (branch.k % 2 != 0 && branch.m % 2 == 0) assert(w > (2.0 / pi) * wL);
    curve.samples.push_back(BoundCurveSample{
        .omega = w,
        .omega_L = wL,
        .alphas = AlphaParams{.alpha1 = freqs.transverse * freqs.transverse / (w * w),
                              .alpha2 = freqs.rabi / w,
                              .alpha3 = wL / w},
    });
  }
  return curve;
}

}  // namespace magguide
