#include "magguide/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "magguide/errors.hpp"

namespace magguide {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool finite(const Matrix6& m) { return m.allFinite(); }

int required_steps(double tau_end) {
  // >= 256 steps per period, pro-rated for shorter horizons.
  return std::max(16, static_cast<int>(std::ceil(256.0 * tau_end / two_pi - 1e-9)));
}

// Composite Simpson integral of ||A(tau)||_F over [0, tau_end].
double integral_of_matrix_norm(const LinearizedSystem& sys, double tau_end) {
  constexpr int nodes = 513;
  const double h = tau_end / (nodes - 1);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * system_matrix(sys.alphas, sys.branch, i * h).norm();
  }
  return sum * h / 3.0;
}

}  // namespace

double spin_coupling_rate(const AlphaParams& a, BranchIndex branch, double tau) {
  const double c = std::cos(tau);
  return parity_sign(branch.k) *
         (branch_sign(branch) * a.alpha1 * a.alpha2 * c * c + a.alpha3 * std::sin(tau));
}

Matrix6 system_matrix(const AlphaParams& a, BranchIndex branch, double tau) {
  const double c = std::cos(tau);
  const double s = std::sin(tau);
  const double f = spin_coupling_rate(a, branch, tau);
  Matrix6 A = Matrix6::Zero();
  A(0, 1) = -0.5;
  A(1, 0) = 0.5;
  A(1, 5) = parity_sign(branch.m) * a.alpha1 / 2.0;
  A(2, 3) = -0.5;
  A(3, 2) = 0.5;
  A(4, 0) = a.alpha2 * c * c;
  A(4, 1) = a.alpha2 * s * c;
  A(4, 5) = f;
  A(5, 4) = -f;
  return A;
}

Matrix6 fundamental_matrix_propagate(const LinearizedSystem& sys, double tau_end, int steps) {
  sys.alphas.validate();
  if (!(tau_end >= 0.0) || !std::isfinite(tau_end))
    throw invalid_parameter("propagation horizon must be nonnegative");
  if (tau_end == 0.0) return Matrix6::Identity();
  if (steps < required_steps(tau_end))
    throw invalid_parameter("too few propagation steps for the horizon (need 256 per period)");

  const double h = tau_end / steps;
  const auto A = [&](double tau) { return system_matrix(sys.alphas, sys.branch, tau); };

  Matrix6 phi = Matrix6::Identity();
  for (int i = 0; i < steps; ++i) {
    const double tau = i * h;
    const Matrix6 k1 = A(tau) * phi;
    const Matrix6 k2 = A(tau + 0.5 * h) * (phi + 0.5 * h * k1);
    const Matrix6 k3 = A(tau + 0.5 * h) * (phi + 0.5 * h * k2);
    const Matrix6 k4 = A(tau + h) * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (!finite(phi))
    throw numerical_failure("fundamental matrix propagation produced non-finite entries", phi);
  return phi;
}

Matrix6 fundamental_matrix_series(const LinearizedSystem& sys, double tau_end, int order,
                                  int quadrature_nodes) {
  sys.alphas.validate();
  if (!(tau_end >= 0.0) || !std::isfinite(tau_end))
    throw invalid_parameter("series horizon must be nonnegative");
  if (order < 1) throw invalid_parameter("series order must be at least 1");
  if (quadrature_nodes < 129 || quadrature_nodes % 2 == 0)
    throw invalid_parameter("quadrature nodes must be odd and at least 129");
  if (tau_end == 0.0) return Matrix6::Identity();

  const int n = quadrature_nodes;
  const double h = tau_end / (n - 1);

  std::vector<Matrix6> A(n);
  for (int i = 0; i < n; ++i) A[i] = system_matrix(sys.alphas, sys.branch, i * h);

  std::vector<Matrix6> phi(n, Matrix6::Identity());
  std::vector<Matrix6> g(n);
  for (int iter = 0; iter < order; ++iter) {
    for (int i = 0; i < n; ++i) g[i] = A[i] * phi[i];
    // Cumulative Simpson: pairwise panels for even nodes, a 3-point
    // open-ended rule (5,8,-1)/12 for the interior odd nodes.
    Matrix6 acc = Matrix6::Zero();
    phi[0] = Matrix6::Identity();
    for (int i = 0; i + 2 < n; i += 2) {
      phi[i + 1] = Matrix6::Identity() + acc +
                   (h / 12.0) * (5.0 * g[i] + 8.0 * g[i + 1] - g[i + 2]);
      acc += (h / 3.0) * (g[i] + 4.0 * g[i + 1] + g[i + 2]);
      phi[i + 2] = Matrix6::Identity() + acc;
    }
  }
  if (!finite(phi[n - 1]))
    throw numerical_failure("series partial sum produced non-finite entries", phi[n - 1]);
  return phi[n - 1];
}

double series_truncation_bound(const LinearizedSystem& sys, double tau_end, int order) {
  sys.alphas.validate();
  if (!(tau_end >= 0.0) || !std::isfinite(tau_end))
    throw invalid_parameter("series horizon must be nonnegative");
  if (order < 1) throw invalid_parameter("series order must be at least 1");
  if (tau_end == 0.0) return 0.0;
  const double s = integral_of_matrix_norm(sys, tau_end);
  if (s == 0.0) return 0.0;
  // log-space to survive large s / high order
  const double log_bound = (order + 1) * std::log(s) - std::lgamma(order + 2.0) + s;
  return std::exp(log_bound);
}

bool series_remainder_ok(const LinearizedSystem& sys, double tau_end, int order, double tol) {
  return series_truncation_bound(sys, tau_end, order) < tol;
}

bool classify(double max_modulus, double eps_stab) {
  if (!(eps_stab >= 0.0) || !std::isfinite(eps_stab))
    throw invalid_parameter("stability tolerance must be nonnegative");
  return max_modulus <= 1.0 + eps_stab;
}

MonodromyResult monodromy(const LinearizedSystem& sys, Backend backend,
                          const MonodromySettings& settings) {
  if (!(settings.eps_stab >= 0.0) || !std::isfinite(settings.eps_stab))
    throw invalid_parameter("stability tolerance must be nonnegative");

  MonodromyResult r;
  r.backend = backend;
  if (backend == Backend::propagation) {
    r.monodromy = fundamental_matrix_propagate(sys, two_pi, settings.steps);
    r.order_or_steps = settings.steps;
  } else {
    r.monodromy = fundamental_matrix_series(sys, two_pi, settings.order,
                                            settings.quadrature_nodes);
    r.order_or_steps = settings.order;
  }

  Eigen::EigenSolver<Matrix6> solver(r.monodromy, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw numerical_failure("eigenvalue iteration did not converge", r.monodromy);

  const double m_norm = r.monodromy.norm();
  for (int i = 0; i < 6; ++i) {
    const auto lambda = solver.eigenvalues()[i];
    const Eigen::Matrix<std::complex<double>, 6, 1> v = solver.eigenvectors().col(i);
    const double residual = (r.monodromy.cast<std::complex<double>>() * v - lambda * v).norm();
    if (!(residual <= 1e-8 * m_norm))
      throw numerical_failure("eigenpair residual exceeds tolerance", r.monodromy);
    r.multipliers[i] = lambda;
  }
  std::sort(r.multipliers.begin(), r.multipliers.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              const double ma = std::abs(a), mb = std::abs(b);
              if (ma != mb) return ma > mb;
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });

  r.max_modulus = std::abs(r.multipliers[0]);
  r.det_residual = std::abs(r.monodromy.determinant() - 1.0);
  r.stable = classify(r.max_modulus, settings.eps_stab);
  return r;
}

}  // namespace magguide
