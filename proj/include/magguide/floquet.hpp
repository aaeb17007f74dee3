#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

#include "magguide/guide_model.hpp"
#include "magguide/params.hpp"

namespace magguide {

using Matrix6 = Eigen::Matrix<double, 6, 6>;

// Linearization of the envelope dynamics around the steady orbit of `branch`.
// Deviation ordering, frozen for all matrices, tests and file outputs:
// (dXc, dXs, dZc, dZs, dtheta, dnu).
struct LinearizedSystem {
  AlphaParams alphas;
  BranchIndex branch;
};

// Time-varying rate coupling the two spin-angle deviations:
// (-1)^k [ (-1)^(k+m) a1 a2 cos^2(tau) + a3 sin(tau) ].
[[nodiscard]] double spin_coupling_rate(const AlphaParams& a, BranchIndex branch, double tau);

// System matrix A(tau) of the linearized dynamics; continuous, 2*pi-periodic,
// traceless (all diagonal entries are zero).
[[nodiscard]] Matrix6 system_matrix(const AlphaParams& a, BranchIndex branch, double tau);

// Fundamental matrix Phi(tau_end) of Phi' = A(tau) Phi, Phi(0) = I, by
// fixed-step classical RK4. Requires at least 256 steps per period.
[[nodiscard]] Matrix6 fundamental_matrix_propagate(const LinearizedSystem& sys, double tau_end,
                                                   int steps);

// Order-N partial sum of the iterated-integral (Peano-Baker) series for
// Phi(tau_end), computed as N Picard iterations
//   Phi_{j+1}(tau) = I + int_0^tau A(s) Phi_j(s) ds
// with cumulative Simpson quadrature on a uniform grid; the iteration is
// mathematically identical to the truncated series. quadrature_nodes must be
// odd and >= 129.
[[nodiscard]] Matrix6 fundamental_matrix_series(const LinearizedSystem& sys, double tau_end,
                                                int order, int quadrature_nodes);

// Upper bound on the series truncation error in Frobenius norm:
// s^(order+1)/(order+1)! * e^s with s = int_0^tau_end ||A||_F. The series
// backend is trustworthy only where this bound is small; the propagation
// backend is authoritative everywhere.
[[nodiscard]] double series_truncation_bound(const LinearizedSystem& sys, double tau_end,
                                             int order);

// Documented validity region of the series backend: truncation bound < tol.
[[nodiscard]] bool series_remainder_ok(const LinearizedSystem& sys, double tau_end, int order,
                                       double tol = 1e-3);

enum class Backend { propagation, series };

struct MonodromySettings {
  int steps = 1024;             // propagation: RK4 steps over one period
  int order = 4;                // series: partial-sum order
  int quadrature_nodes = 2049;  // series: Simpson grid size (odd)
  double eps_stab = 1e-3;       // stability tolerance band
};

struct MonodromyResult {
  Matrix6 monodromy;
  // Sorted by modulus, then real part, then imaginary part, descending;
  // conjugate pairs end up adjacent.
  std::array<std::complex<double>, 6> multipliers;
  double max_modulus;
  bool stable;
  Backend backend;
  int order_or_steps;
  double det_residual;  // |det(monodromy) - 1|
};

// One-period fundamental matrix, its eigenvalues (dense nonsymmetric solver:
// balancing, Hessenberg reduction, shifted QR), and the stability verdict.
// Every eigenpair is validated by ||M v - lambda v|| <= 1e-8 ||M||; failure
// raises numerical_failure carrying the matrix.
[[nodiscard]] MonodromyResult monodromy(const LinearizedSystem& sys, Backend backend,
                                        const MonodromySettings& settings = {});

// stable <=> max_modulus <= 1 + eps_stab. The system matrix is traceless, so
// det(M) = 1 and multipliers of stable points lie ON the unit circle; a
// strict |lambda| < 1 test would reject everything. The band absorbs the
// numerical precision of the multipliers.
[[nodiscard]] bool classify(double max_modulus, double eps_stab);

}  // namespace magguide
