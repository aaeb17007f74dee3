// Acceptance gate: one PASS/FAIL line per release criterion, nonzero exit if
// any criterion fails. Each criterion carries a wall-clock budget that is
// enforced, not just reported.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "magguide/bounds.hpp"
#include "magguide/floquet.hpp"
#include "magguide/guide_model.hpp"
#include "magguide/io.hpp"
#include "magguide/params.hpp"
#include "magguide/scan.hpp"

#ifndef MAGGUIDE_CLI_PATH
#error "MAGGUIDE_CLI_PATH must point at the command-line binary"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace magguide;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + MAGGUIDE_CLI_PATH + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  CliResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d =
        fs::temp_directory_path() / ("magguide_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path reference_config() {
  static const fs::path p = [] {
    const fs::path path = work_dir() / "guide.params";
    std::ofstream out(path);
    out << "species = Rb87\n"
        << "gradient_T_per_m = 2.90\n"
        << "bias_T = 1.5e-4\n"
        << "phi_rad = 1e-3\n"
        << "pitch_m = 15e-6\n"
        << "omega_rad_s = 62831.853071795864\n";
    return path;
  }();
  return p;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Euclidean distance of a trajectory sample from the exact steady orbit.
double orbit_deviation(const NonlinearState& s, const SteadyOrbit& orbit) {
  const NonlinearState r = orbit.analytic_state(s.tau);
  const double d[7] = {s.X - r.X,   s.Vx - r.Vx, s.Z - r.Z, s.Vz - r.Vz,
                       s.nx - r.nx, s.ny - r.ny, s.nz - r.nz};
  double sum = 0.0;
  for (double v : d) sum += v * v;
  return std::sqrt(sum);
}

NonlinearState perturbed_orbit_state(const SteadyOrbit& orbit, double eps) {
  NonlinearState s = orbit.initial_state();
  s.X += eps;
  s.Z += eps;
  const double theta = std::atan2(s.ny, s.nx) + eps;
  const double nu = std::acos(s.nz);
  s.nx = std::cos(theta) * std::sin(nu);
  s.ny = std::sin(theta) * std::sin(nu);
  s.nz = std::cos(nu);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Gate {
  int failures = 0;

  void criterion(int index, const std::string& label, double budget_seconds,
                 const std::function<std::pair<bool, std::string>()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      std::tie(ok, detail) = body();
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (wall > budget_seconds) {
      ok = false;
      detail += " [over budget " + fmt(budget_seconds) + " s]";
    }
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << index << ": " << label << " ("
              << detail << "; " << fmt(wall) << " s)\n"
              << std::flush;
  }
};

}  // namespace

int main() {
  Gate gate;

  gate.criterion(1, "threshold frequency between 2.7 and 3.2 kHz via the boundary command", 1.0,
                 [] {
                   const fs::path out = work_dir() / "boundary.csv";
                   const CliResult r = run_cli("boundary --config '" +
                                               reference_config().string() + "' --out '" +
                                               out.string() + "'");
                   if (r.exit_code != 0)
                     return std::pair{false, "exit code " + std::to_string(r.exit_code)};
                   const json sidecar = json::parse(read_file(work_dir() / "boundary.json"));
                   const double hz = sidecar.at("threshold_omega_rad_s").get<double>() / two_pi;
                   return std::pair{hz >= 2.7e3 && hz <= 3.2e3, fmt(hz) + " Hz"};
                 });

  gate.criterion(2, "threshold frequency ratio within 10% of the design value 6000", 1.0, [] {
    const fs::path out = work_dir() / "boundary2.csv";
    const CliResult r = run_cli("boundary --config '" + reference_config().string() +
                                "' --out '" + out.string() + "'");
    if (r.exit_code != 0) return std::pair{false, "exit code " + std::to_string(r.exit_code)};
    const json sidecar = json::parse(read_file(work_dir() / "boundary2.json"));
    const double ratio = sidecar.at("threshold_alpha_ratio").get<double>();
    const double defect = std::abs(ratio / 6.0e3 - 1.0);
    return std::pair{defect <= 0.10, "ratio " + fmt(ratio) + ", defect " + fmt(100.0 * defect) + "%"};
  });

  gate.criterion(3, "monodromy determinant equals 1 within 1e-6 over 1000 random draws", 30.0,
                 [] {
                   std::mt19937_64 rng(20260815ULL);
                   double worst = 0.0;
                   for (int i = 0; i < 1000; ++i) {
                     const AlphaParams a{.alpha1 = log_uniform(rng, 1e-4, 1e-1),
                                         .alpha2 = log_uniform(rng, 1e-1, 1e2),
                                         .alpha3 = uniform(rng, -1.0, 1.0)};
                     const BranchIndex b{static_cast<int>(rng() % 2),
                                         static_cast<int>(rng() % 2)};
                     MonodromySettings settings;
                     settings.steps = 1024;
                     const MonodromyResult r =
                         monodromy({a, b}, Backend::propagation, settings);
                     worst = std::max(worst, r.det_residual);
                   }
                   return std::pair{worst <= 1e-6, "worst residual " + fmt(worst)};
                 });

  gate.criterion(4, "decoupled monodromy is diag(-1,-1,-1,-1,1,1) within 1e-8", 1.0, [] {
    const AlphaParams a{.alpha1 = 0.0, .alpha2 = 0.0, .alpha3 = 0.0};
    MonodromySettings settings;
    settings.steps = 1024;
    const MonodromyResult r = monodromy({a, BranchIndex{1, 0}}, Backend::propagation, settings);
    Matrix6 want = Matrix6::Identity();
    for (int i = 0; i < 4; ++i) want(i, i) = -1.0;
    const double defect = (r.monodromy - want).cwiseAbs().maxCoeff();
    int minus = 0, plus = 0;
    for (const std::complex<double>& lam : r.multipliers) {
      minus += (std::abs(lam + 1.0) <= 1e-8);
      plus += (std::abs(lam - 1.0) <= 1e-8);
    }
    return std::pair{defect <= 1e-8 && minus == 4 && plus == 2,
                     "matrix defect " + fmt(defect) + ", multipliers " + std::to_string(minus) +
                         "x(-1) " + std::to_string(plus) + "x(+1)"};
  });

  gate.criterion(5, "steady orbit reproduced for all four parity branches within 1e-6", 5.0, [] {
    const AlphaParams a = alphas_from_physical(rb87_reference_params());
    double worst = 0.0;
    for (int k = 0; k <= 1; ++k) {
      for (int m = 0; m <= 1; ++m) {
        const SteadyOrbit orbit = steady_orbit({k, m}, a);
        const Trajectory traj = integrate_nonlinear(orbit.initial_state(), a, 10.0, 1024);
        if (traj.diverged) return std::pair{false, std::string("diverged")};
        for (const NonlinearState& s : traj.samples)
          worst = std::max(worst, orbit_deviation(s, orbit));
      }
    }
    return std::pair{worst <= 1e-6, "worst deviation " + fmt(worst)};
  });

  gate.criterion(6, "order-4 series matches propagation within 1e-3 on 100 points", 30.0, [] {
    std::mt19937_64 rng(0xC6ULL);
    double worst = 0.0;
    int points = 0;
    while (points < 100) {
      const AlphaParams a{.alpha1 = log_uniform(rng, 1e-4, 1e-2),
                          .alpha2 = log_uniform(rng, 1e-1, 1.0),
                          .alpha3 = uniform(rng, -0.05, 0.05)};
      const LinearizedSystem sys{a, BranchIndex{static_cast<int>(rng() % 2),
                                                static_cast<int>(rng() % 2)}};
      double tau_end = two_pi;
      while (tau_end > 0.05 && !series_remainder_ok(sys, tau_end, 4)) tau_end *= 0.5;
      if (tau_end <= 0.05) continue;
      ++points;
      const Matrix6 p = fundamental_matrix_propagate(sys, tau_end, 1024);
      const Matrix6 s = fundamental_matrix_series(sys, tau_end, 4, 2049);
      worst = std::max(worst, (s - p).cwiseAbs().maxCoeff() / p.cwiseAbs().maxCoeff());
    }
    return std::pair{worst <= 1e-3, "worst relative defect " + fmt(worst)};
  });

  gate.criterion(7, "mirrored parity branches classify 20x20 grids identically", 300.0, [] {
    ScanSpec a;
    a.x = ScanAxis{ScanQuantity::ratio_a2_a1, AxisScale::log, 1e2, 1e4, 20};
    a.y = ScanAxis{ScanQuantity::alpha3, AxisScale::linear, -1.0, -0.05, 20};
    a.fixed = FixedAlphas{.alpha1 = 0.02, .alpha2 = std::nullopt, .alpha3 = std::nullopt};
    a.branch = BranchIndex{0, 0};
    ScanSpec b = a;
    b.y = ScanAxis{ScanQuantity::alpha3, AxisScale::linear, 0.05, 1.0, 20};
    b.branch = BranchIndex{1, 0};
    const SymmetryReport report = symmetry_check(a, b);
    return std::pair{report.pass(), std::to_string(report.matches) + "/" +
                                        std::to_string(report.total) + " cells agree"};
  });

  gate.criterion(8, "every cell of the half-threshold column is unstable", 60.0, [] {
    const PhysicalParams phys = rb87_reference_params();
    const double r_th = threshold_alpha_ratio(characteristic_frequencies(phys));
    ScanSpec s;
    s.physical = phys;
    s.x = ScanAxis{ScanQuantity::ratio_a2_a1, AxisScale::log, 0.5 * r_th, r_th, 2};
    s.y = ScanAxis{ScanQuantity::alpha3, AxisScale::linear, 0.05, 1.6, 40};
    s.branch = BranchIndex{1, 0};
    s.settings.steps = 4096;
    const ScanResult r = run_scan(s);
    int unstable = 0;
    double min_mod = 1e300;
    for (int iy = 0; iy < s.y.n; ++iy) {
      const ScanCell& cell = r.at(0, iy);
      unstable += (cell.stable == 0);
      min_mod = std::min(min_mod, cell.max_modulus);
    }
    return std::pair{unstable == s.y.n, std::to_string(unstable) + "/" +
                                            std::to_string(s.y.n) +
                                            " unstable, smallest multiplier " + fmt(min_mod)};
  });

  gate.criterion(9, "at most 5% of stable cells lie beyond the bound on a 100x100 diagram",
                 900.0, [] {
                   const PhysicalParams phys = rb87_reference_params();
                   const CharacteristicFrequencies freqs = characteristic_frequencies(phys);
                   const double r_th = threshold_alpha_ratio(freqs);
                   ScanSpec s;
                   s.physical = phys;
                   s.x = ScanAxis{ScanQuantity::ratio_a2_a1, AxisScale::log, r_th, 30.0 * r_th,
                                  100};
                   s.y = ScanAxis{ScanQuantity::alpha3, AxisScale::linear, 0.0, 1.6, 100};
                   s.branch = BranchIndex{1, 0};
                   s.settings.steps = 4096;
                   const BoundCurve curve =
                       bound_curve(freqs, s.branch, omega_from_alpha_ratio(s.x.min, freqs),
                                   omega_from_alpha_ratio(s.x.max, freqs), 512);
                   const ScanResult r = overlay_bound(run_scan(s), curve);
                   if (!r.overlay || !r.overlay->in_window)
                     return std::pair{false, std::string("bound curve missed the window")};
                   const double frac = r.overlay->stable_beyond_fraction;
                   return std::pair{frac <= 0.05,
                                    fmt(100.0 * frac) + "% of " +
                                        std::to_string(r.stable_count()) + " stable cells"};
                 });

  gate.criterion(10, "nonlinear perturbation growth follows the leading multiplier", 60.0, [] {
    // strongly unstable point: growth factor over 20 periods within 2x of
    // the linear prediction (in log), probed with a 1e-6 perturbation
    const AlphaParams hot{.alpha1 = 0.3, .alpha2 = 160.0 / 3.0, .alpha3 = 0.8};
    const BranchIndex branch{1, 0};
    MonodromySettings settings;
    settings.steps = 4096;
    const MonodromyResult mono = monodromy({hot, branch}, Backend::propagation, settings);
    if (mono.max_modulus < 1.1)
      return std::pair{false, "expected max multiplier >= 1.1, got " + fmt(mono.max_modulus)};
    const double predicted = 20.0 * std::log(mono.max_modulus);

    const SteadyOrbit orbit = steady_orbit(branch, hot);
    const double eps = 1e-6;
    const NonlinearState s0 = perturbed_orbit_state(orbit, eps);
    const double dev0 = orbit_deviation(s0, orbit);
    const Trajectory traj = integrate_nonlinear(s0, hot, 20.0, 4096);
    if (traj.diverged) return std::pair{false, std::string("diverged")};
    const double grown = std::log(orbit_deviation(traj.samples.back(), orbit) / dev0);
    const double ratio = grown / predicted;
    if (!(ratio >= 0.5 && ratio <= 2.0))
      return std::pair{false, "log growth " + fmt(grown) + " vs predicted " + fmt(predicted)};

    // stable point: the same perturbation must stay within 1000x its size
    const AlphaParams cold{.alpha1 = 0.001, .alpha2 = 1.0, .alpha3 = 0.1};
    const MonodromyResult cold_mono = monodromy({cold, branch}, Backend::propagation, settings);
    if (!cold_mono.stable)
      return std::pair{false, std::string("reference point not classified stable")};
    const SteadyOrbit cold_orbit = steady_orbit(branch, cold);
    const NonlinearState c0 = perturbed_orbit_state(cold_orbit, eps);
    const double cold_dev0 = orbit_deviation(c0, cold_orbit);
    const Trajectory cold_traj = integrate_nonlinear(c0, cold, 20.0, 4096);
    if (cold_traj.diverged) return std::pair{false, std::string("stable point diverged")};
    double worst = 0.0;
    for (const NonlinearState& s : cold_traj.samples)
      worst = std::max(worst, orbit_deviation(s, cold_orbit));
    const double amplification = worst / cold_dev0;
    return std::pair{amplification <= 1e3,
                     "growth ratio " + fmt(ratio) + ", stable amplification " +
                         fmt(amplification) + "x"};
  });

  gate.criterion(11, "scan output is byte-identical across reruns and worker counts", 300.0, [] {
    const fs::path out = work_dir() / "repro.csv";
    const std::string grid =
        "scan --x 'ratio:log:1e2:1e4:20' --y 'alpha3:linear:0.05:1:20' --alpha1 0.02 --out '" +
        out.string() + "'";
    std::string reference;
    for (const std::string workers : {"1", "4", "8", "4"}) {
      const CliResult r = run_cli(grid + " --workers " + workers);
      if (r.exit_code != 0)
        return std::pair{false, "exit code " + std::to_string(r.exit_code) + " at --workers " +
                                    workers};
      const std::string csv = read_file(out);
      if (reference.empty())
        reference = csv;
      else if (csv != reference)
        return std::pair{false, "output differs at --workers " + workers};
    }
    return std::pair{true, "4 runs, " + std::to_string(reference.size()) + " bytes each"};
  });

  std::error_code ec;
  fs::remove_all(work_dir(), ec);

  if (gate.failures == 0) {
    std::cout << "acceptance: all criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << gate.failures << " criterion(s) failed\n";
  return 1;
}
