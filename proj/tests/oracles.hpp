#pragma once

// Test-support oracles: independent re-implementations used to check the
// library against, plus reference values computed outside this codebase and
// frozen here. Nothing in src/ may include this header.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracles {

// Reference values for the rubidium-87 parameter set
//   gradient 2.90 T/m, bias 1.5e-4 T, phase 1e-3 rad, pitch 15e-6 m,
//   drive omega = 2*pi*1e4 rad/s,
// computed independently with 64-bit floats and frozen.
namespace rb87_reference {
inline constexpr double mass_kg = 1.4431608951791763e-25;
inline constexpr double larmor = 6595.575044392638;           // rad/s
inline constexpr double transverse = 2492.382981448412;       // rad/s
inline constexpr double rabi = 1912716.7628738652;            // rad/s
inline constexpr double alpha1 = 0.0015735111240953153;       // at omega above
inline constexpr double alpha2 = 30.441832754610427;
inline constexpr double alpha3 = 0.10497183708486355;
inline constexpr double omega_at_ratio_6e3 = 19486.333931261706;  // rad/s
inline constexpr double threshold_omega = 18111.31875826722;      // rad/s
inline constexpr double threshold_omega_hz = 2882.5059062911964;
inline constexpr double threshold_alpha_ratio = 5576.621694615867;
}  // namespace rb87_reference

inline double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

// Adaptive Simpson quadrature with absolute tolerance.
namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b,
                           double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive(const std::function<double(double)>& f, double a, double b, double fa,
                       double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_step(f, a, m, fa, flm, fm);
  const double right = simpson_step(f, m, b, fm, frm, fb);
  if (depth <= 0) throw std::runtime_error("adaptive simpson: max depth");
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return detail::adaptive(f, a, b, fa, fm, fb, detail::simpson_step(f, a, b, fa, fm, fb), tol,
                          60);
}

// Characteristic polynomial of a 6x6 matrix via the Faddeev-LeVerrier
// recursion: p(x) = x^6 + c[0] x^5 + ... + c[5].
inline std::array<double, 6> characteristic_polynomial(const Eigen::Matrix<double, 6, 6>& m) {
  std::array<double, 6> c{};
  Eigen::Matrix<double, 6, 6> mk = m;
  c[0] = -mk.trace();
  for (int k = 2; k <= 6; ++k) {
    mk = m * (mk + c[k - 2] * Eigen::Matrix<double, 6, 6>::Identity());
    c[k - 1] = -mk.trace() / k;
  }
  return c;
}

// Normalized characteristic-polynomial residual |p(lambda)| / scale with
// scale = sum_k |c_k| |lambda|^k. Robust against multiple roots, where
// explicit root-finding degrades; any eigenvalue must drive this to ~0.
inline double charpoly_residual(const Eigen::Matrix<double, 6, 6>& m,
                                std::complex<double> lambda) {
  const std::array<double, 6> c = characteristic_polynomial(m);
  std::complex<double> p{1.0, 0.0};
  double scale = 1.0;
  for (double ck : c) {
    p = p * lambda + ck;
    scale = scale * std::abs(lambda) + std::abs(ck);
  }
  return std::abs(p) / scale;
}

// All six roots of the monic polynomial above via Durand-Kerner iteration.
// Reliable for well-separated roots only; multiple roots stall the update
// criterion (use charpoly_residual against candidate eigenvalues instead).
inline std::array<std::complex<double>, 6> polynomial_roots(const std::array<double, 6>& c) {
  using cd = std::complex<double>;
  const auto eval = [&](cd x) {
    cd p{1.0, 0.0};
    for (double ck : c) p = p * x + ck;
    return p;
  };
  std::array<cd, 6> z;
  const cd seed{0.4, 0.9};
  cd w{1.0, 0.0};
  for (auto& zi : z) {
    w *= seed;
    zi = w;
  }
  for (int iter = 0; iter < 2000; ++iter) {
    double step = 0.0, scale = 1.0;
    for (int i = 0; i < 6; ++i) {
      cd denom{1.0, 0.0};
      for (int j = 0; j < 6; ++j)
        if (j != i) denom *= z[i] - z[j];
      const cd delta = eval(z[i]) / denom;
      z[i] -= delta;
      step = std::max(step, std::abs(delta));
      scale = std::max(scale, std::abs(z[i]));
    }
    if (step <= 1e-14 * scale) return z;
  }
  throw std::runtime_error("durand-kerner: no convergence");
}

// Eigenvalues of a 6x6 matrix, computed without Eigen's eigensolver.
inline std::array<std::complex<double>, 6> eigenvalues_by_charpoly(
    const Eigen::Matrix<double, 6, 6>& m) {
  return polynomial_roots(characteristic_polynomial(m));
}

// Closed-form fundamental matrix of the decoupled (all alphas zero) linear
// system: two centre rotations at rate 1/2 and a frozen spin block.
inline Eigen::Matrix<double, 6, 6> decoupled_fundamental(double tau) {
  Eigen::Matrix<double, 6, 6> phi = Eigen::Matrix<double, 6, 6>::Identity();
  const double c = std::cos(0.5 * tau), s = std::sin(0.5 * tau);
  for (int blk = 0; blk < 2; ++blk) {
    const int o = 2 * blk;
    phi(o, o) = c;
    phi(o, o + 1) = -s;
    phi(o + 1, o) = s;
    phi(o + 1, o + 1) = c;
  }
  return phi;
}

}  // namespace oracles
