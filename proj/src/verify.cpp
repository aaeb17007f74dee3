#include "magguide/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "magguide/bounds.hpp"
#include "magguide/errors.hpp"
#include "magguide/floquet.hpp"
#include "magguide/guide_model.hpp"
#include "magguide/params.hpp"
#include "magguide/scan.hpp"

namespace magguide {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Reporter {
  std::ostream& out;
  bool all_ok = true;

  void check(const char* name, bool ok, const std::string& detail) {
    all_ok = all_ok && ok;
    out << (ok ? "ok   " : "FAIL ") << name << " (" << detail << ")\n";
  }
};

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

// Worst distance from each multiplier to its best conjugate partner.
double conjugate_pairing_defect(const std::array<std::complex<double>, 6>& mults) {
  double worst = 0.0;
  for (const auto& lambda : mults) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mu : mults) best = std::min(best, std::abs(std::conj(lambda) - mu));
    worst = std::max(worst, best);
  }
  return worst;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

bool run_verification(std::uint64_t seed, double eps_stab, std::ostream& out) {
  if (!(eps_stab >= 0.0)) throw invalid_parameter("stability tolerance must be nonnegative");
  Reporter r{out};
  std::mt19937_64 rng(seed);
  MonodromySettings settings;
  settings.eps_stab = eps_stab;

  {  // volume preservation + conjugate pairing over random draws
    double worst_det = 0.0;
    double worst_pair = 0.0;
    constexpr int draws = 200;
    for (int i = 0; i < draws; ++i) {
      const AlphaParams a{.alpha1 = log_uniform(rng, 1e-4, 1e-1),
                          .alpha2 = log_uniform(rng, 1e-1, 1e2),
                          .alpha3 = uniform(rng, -1.0, 1.0)};
      const BranchIndex branch{static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
      const MonodromyResult m = monodromy({a, branch}, Backend::propagation, settings);
      worst_det = std::max(worst_det, m.det_residual);
      worst_pair = std::max(worst_pair, conjugate_pairing_defect(m.multipliers));
    }
    r.check("det(M) = 1 within 1e-6", worst_det <= 1e-6,
            "max residual " + fmt(worst_det) + ", 200 draws");
    r.check("multipliers conjugate-paired within 1e-8", worst_pair <= 1e-8,
            "max defect " + fmt(worst_pair));
  }

  {  // decoupled limit against the closed-form block exponential
    Matrix6 expected = Matrix6::Identity();
    expected(0, 0) = expected(1, 1) = expected(2, 2) = expected(3, 3) = -1.0;
    const MonodromyResult m = monodromy({AlphaParams{0.0, 0.0, 0.0}, BranchIndex{1, 0}},
                                        Backend::propagation, settings);
    const double err = (m.monodromy - expected).cwiseAbs().maxCoeff();
    r.check("decoupled monodromy = diag(-1,-1,-1,-1,1,1) within 1e-8",
            err <= 1e-8 && m.stable && std::abs(m.max_modulus - 1.0) <= 1e-8,
            "max entry error " + fmt(err));
  }

  {  // steady orbit solves the nonlinear dynamics pointwise
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const AlphaParams a{.alpha1 = log_uniform(rng, 1e-4, 1e-1),
                          .alpha2 = log_uniform(rng, 1e-1, 1e1),
                          .alpha3 = uniform(rng, -1.0, 1.0)};
      const BranchIndex branch{static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)};
      const SteadyOrbit orbit = steady_orbit(branch, a);
      const double tau = uniform(rng, 0.0, 2.0 * two_pi);
      const NonlinearState s = orbit.analytic_state(tau);
      const NonlinearDeriv d = nonlinear_rhs(s, a);
      const double zc = orbit.Zc;
      worst = std::max({worst, std::abs(d.dX), std::abs(d.dVx),
                        std::abs(d.dZ - (-zc * std::sin(tau))),
                        std::abs(d.dVz - (-zc * std::cos(tau))), std::abs(d.dnx),
                        std::abs(d.dny), std::abs(d.dnz)});
    }
    r.check("steady orbit satisfies the dynamics within 1e-14", worst <= 1e-14,
            "max defect " + fmt(worst) + ", 100 draws");
  }

  {  // ten-period return of the steady orbit under the full integrator
    const AlphaParams a{.alpha1 = 1.6e-3, .alpha2 = 30.0, .alpha3 = 0.4};
    const SteadyOrbit orbit = steady_orbit(BranchIndex{1, 0}, a);
    const Trajectory traj = integrate_nonlinear(orbit.initial_state(), a, 10.0, 1024, false);
    const NonlinearState& last = traj.samples.back();
    const NonlinearState ref = orbit.analytic_state(last.tau);
    const double dev = std::max({std::abs(last.X - ref.X), std::abs(last.Vx - ref.Vx),
                                 std::abs(last.Z - ref.Z), std::abs(last.Vz - ref.Vz),
                                 std::abs(last.nx - ref.nx), std::abs(last.ny - ref.ny),
                                 std::abs(last.nz - ref.nz)});
    r.check("steady orbit returns within 1e-6 after 10 periods",
            !traj.diverged && dev <= 1e-6, "max deviation " + fmt(dev));
  }

  {  // series backend against propagation inside its validity region
    double worst = 0.0;
    int points = 0;
    while (points < 20) {
      const AlphaParams a{.alpha1 = log_uniform(rng, 1e-4, 1e-2),
                          .alpha2 = log_uniform(rng, 1e-1, 1.0),
                          .alpha3 = uniform(rng, -0.05, 0.05)};
      const LinearizedSystem sys{a, BranchIndex{1, 0}};
      double tau_end = two_pi;
      while (tau_end > 0.05 && !series_remainder_ok(sys, tau_end, 4)) tau_end *= 0.5;
      if (tau_end <= 0.05) continue;
      const Matrix6 p = fundamental_matrix_propagate(sys, tau_end, 1024);
      const Matrix6 s = fundamental_matrix_series(sys, tau_end, 4, 2049);
      worst = std::max(worst,
                       (s - p).cwiseAbs().maxCoeff() / p.cwiseAbs().maxCoeff());
      ++points;
    }
    r.check("series backend agrees with propagation within 1e-3 in validity region",
            worst <= 1e-3, "max relative defect " + fmt(worst) + ", 20 points");
  }

  {  // branch symmetry for even m: (k=0, -c) vs (k=1, +c)
    ScanSpec a;
    a.x = ScanAxis{ScanQuantity::ratio_a2_a1, AxisScale::log, 1e2, 1e4, 8};
    a.y = ScanAxis{ScanQuantity::alpha3, AxisScale::linear, -1.0, -0.05, 8};
    a.fixed = FixedAlphas{.alpha1 = 0.02, .alpha2 = std::nullopt, .alpha3 = std::nullopt};
    a.branch = BranchIndex{0, 0};
    a.settings = settings;
    a.workers = 1;
    ScanSpec b = a;
    b.y = ScanAxis{ScanQuantity::alpha3, AxisScale::linear, 0.05, 1.0, 8};
    b.branch = BranchIndex{1, 0};
    const SymmetryReport report = symmetry_check(a, b);
    r.check("mirrored-branch classification agrees 100%", report.pass(),
            std::to_string(report.matches) + "/" + std::to_string(report.total) + " cells");
  }

  return r.all_ok;
}

}  // namespace magguide
