#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magguide/bounds.hpp"
#include "magguide/errors.hpp"
#include "magguide/floquet.hpp"
#include "magguide/guide_model.hpp"
#include "magguide/io.hpp"
#include "magguide/params.hpp"
#include "magguide/scan.hpp"
#include "magguide/verify.hpp"

namespace {

using namespace magguide;

constexpr int exit_ok = 0;
constexpr int exit_checks_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_unstable = 10;
constexpr int exit_divergence = 11;
constexpr int exit_numerical = 20;

constexpr double two_pi = 2.0 * std::numbers::pi;

Backend parse_backend(const std::string& name) {
  if (name == "propagate" || name == "propagation") return Backend::propagation;
  if (name == "series") return Backend::series;
  throw invalid_parameter("unknown backend '" + name + "' (expected propagate or series)");
}

ScanAxis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 5)
    throw invalid_parameter("axis spec must be quantity:scale:min:max:n, got '" + text + "'");
  const auto quantity = scan_quantity_from_string(parts[0]);
  if (!quantity) throw invalid_parameter("unknown axis quantity '" + parts[0] + "'");
  const auto scale = axis_scale_from_string(parts[1]);
  if (!scale) throw invalid_parameter("unknown axis scale '" + parts[1] + "'");
  ScanAxis axis;
  axis.quantity = *quantity;
  axis.scale = *scale;
  axis.min = io::parse_double(parts[2]);
  axis.max = io::parse_double(parts[3]);
  const double n = io::parse_double(parts[4]);
  if (!(n >= 2.0) || n != std::floor(n) || n > 1e6)
    throw invalid_parameter("axis node count must be an integer >= 2");
  axis.n = static_cast<int>(n);
  axis.validate();
  return axis;
}

std::filesystem::path sibling_path(const std::filesystem::path& out, const char* ext) {
  std::filesystem::path p = out;
  p.replace_extension(ext);
  if (p == out) p += ext;
  return p;
}

void require_writable(const std::filesystem::path& p) {
  if (!io::probe_writable(p))
    throw invalid_parameter("output path not writable: " + p.string());
}

void warn_phase(const PhysicalParams& p) {
  if (!p.phase_in_model_range())
    std::cerr << "warning: |phase| = " << std::abs(p.phase_rad)
              << " rad exceeds the small-phase model range (0.3 rad)\n";
}

struct PointOptions {
  std::string config;
  std::optional<double> alpha1, alpha2, alpha3;
  BranchIndex branch{1, 0};
  std::string backend = "propagate";
  MonodromySettings settings;
};

AlphaParams resolve_alphas(const PointOptions& opt) {
  const bool inline_given = opt.alpha1 || opt.alpha2 || opt.alpha3;
  if (!opt.config.empty() && inline_given)
    throw invalid_parameter("give either --config or inline --alpha1/2/3, not both");
  if (!opt.config.empty()) {
    const PhysicalParams p = io::parse_params_file(opt.config);
    warn_phase(p);
    return alphas_from_physical(p);
  }
  if (!(opt.alpha1 && opt.alpha2 && opt.alpha3))
    throw invalid_parameter("need --alpha1, --alpha2 and --alpha3 (or --config)");
  AlphaParams a{*opt.alpha1, *opt.alpha2, *opt.alpha3};
  a.validate();
  return a;
}

int cmd_params(const std::string& config) {
  const PhysicalParams p = io::parse_params_file(config);
  warn_phase(p);
  const CharacteristicFrequencies f = characteristic_frequencies(p);
  const AlphaParams a = alphas_from_physical(p);
  auto line = [](const char* name, double rad_s) {
    std::cout << name << " = " << io::format_double(rad_s) << " rad/s ("
              << io::format_double(rad_s / two_pi) << " Hz)\n";
  };
  std::cout << "species: mass = " << io::format_double(p.species.mass_kg)
            << " kg, g_F = " << io::format_double(p.species.lande_g_factor) << "\n";
  line("larmor", f.larmor);
  line("transverse", f.transverse);
  line("rabi", f.rabi);
  line("omega", p.omega_rad_s);
  std::cout << "alpha1 = " << io::format_double(a.alpha1) << "\n"
            << "alpha2 = " << io::format_double(a.alpha2) << "\n"
            << "alpha3 = " << io::format_double(a.alpha3) << "\n"
            << "alpha2/alpha1 = " << io::format_double(a.alpha2 / a.alpha1) << "\n";
  return exit_ok;
}

int cmd_point(const PointOptions& opt, const std::string& out) {
  const AlphaParams a = resolve_alphas(opt);
  const LinearizedSystem sys{a, opt.branch};
  const MonodromyResult result = monodromy(sys, parse_backend(opt.backend), opt.settings);
  const std::string report = io::point_report(result, sys).dump(2) + "\n";
  if (!out.empty()) io::write_file(out, report);
  std::cout << report;
  return result.stable ? exit_ok : exit_unstable;
}

struct ScanOptions {
  std::string config;
  std::string x_spec = "ratio:log:1e3:1e5:50";
  std::string y_spec = "alpha3:linear:0:1.6:50";
  std::optional<double> alpha1, alpha2, alpha3;
  BranchIndex branch{1, 0};
  std::string backend = "propagate";
  MonodromySettings settings;
  int workers = 0;
  std::string out = "scan.csv";
  bool pgm = false;
  bool overlay = false;
};

int cmd_scan(const ScanOptions& opt) {
  ScanSpec spec;
  spec.x = parse_axis(opt.x_spec);
  spec.y = parse_axis(opt.y_spec);
  spec.branch = opt.branch;
  spec.backend = parse_backend(opt.backend);
  spec.settings = opt.settings;
  spec.workers = opt.workers;
  if (!opt.config.empty()) {
    spec.physical = io::parse_params_file(opt.config);
    warn_phase(*spec.physical);
    if (opt.alpha1 || opt.alpha2 || opt.alpha3)
      throw invalid_parameter("fixed alphas conflict with --config (physical mode)");
  } else {
    spec.fixed = FixedAlphas{opt.alpha1, opt.alpha2, opt.alpha3};
  }
  spec.validate();
  if (opt.overlay && !spec.physical)
    throw invalid_parameter("--overlay needs physical-mode parameters (--config)");

  const std::filesystem::path out = opt.out;
  const std::filesystem::path sidecar = sibling_path(out, ".json");
  const std::filesystem::path pgm = sibling_path(out, ".pgm");
  require_writable(out);
  require_writable(sidecar);
  if (opt.pgm) require_writable(pgm);

  ScanResult result = run_scan(spec);
  if (opt.overlay) {
    const CharacteristicFrequencies freqs = characteristic_frequencies(*spec.physical);
    const ScanAxis& freq_axis =
        (spec.x.quantity == ScanQuantity::omega || spec.x.quantity == ScanQuantity::ratio_a2_a1)
            ? spec.x
            : spec.y;
    double lo = freq_axis.min, hi = freq_axis.max;
    if (freq_axis.quantity == ScanQuantity::ratio_a2_a1) {
      lo = omega_from_alpha_ratio(freq_axis.min, freqs);
      hi = omega_from_alpha_ratio(freq_axis.max, freqs);
    }
    result = overlay_bound(std::move(result), bound_curve(freqs, spec.branch, lo, hi, 512));
  }

  io::write_file(out, io::scan_csv(result));
  io::write_file(sidecar, io::scan_sidecar(result).dump(2) + "\n");
  if (opt.pgm) io::write_file(pgm, io::scan_pgm(result));

  const int total = static_cast<int>(result.cells.size());
  const int stable = result.stable_count();
  std::cout << "scan " << spec.x.n << "x" << spec.y.n << ": " << stable << " stable, "
            << (total - stable - result.failed_nodes) << " unstable, " << result.failed_nodes
            << " failed; wall " << io::format_double(result.wall_seconds) << " s\n";
  if (result.overlay)
    std::cout << "overlay: stable fraction beyond estimated upper bound = "
              << io::format_double(result.overlay->stable_beyond_fraction) << "\n";
  if (result.warning) std::cerr << "warning: more than 1% of nodes failed\n";
  return exit_ok;
}

int cmd_boundary(const std::string& config, BranchIndex branch, double omega_min,
                 double omega_max, int samples, const std::string& out_str) {
  const PhysicalParams p = io::parse_params_file(config);
  warn_phase(p);
  const CharacteristicFrequencies freqs = characteristic_frequencies(p);
  const double w_th = threshold_omega(freqs);
  if (omega_min <= 0.0) omega_min = 0.5 * w_th;
  if (omega_max <= 0.0) omega_max = 5.0 * w_th;

  const std::filesystem::path out = out_str;
  const std::filesystem::path sidecar = sibling_path(out, ".json");
  require_writable(out);
  require_writable(sidecar);

  const BoundCurve curve = bound_curve(freqs, branch, omega_min, omega_max, samples);
  io::write_file(out, io::boundary_csv(curve));
  io::write_file(sidecar, io::boundary_sidecar(curve).dump(2) + "\n");

  std::cout << "threshold omega = " << io::format_double(w_th) << " rad/s ("
            << io::format_double(w_th / two_pi) << " Hz)\n"
            << "threshold alpha2/alpha1 = " << io::format_double(threshold_alpha_ratio(freqs))
            << "\n"
            << "curve samples = " << curve.samples.size() << " (estimated upper bound)\n";
  return exit_ok;
}

struct SimulateOptions {
  std::string config;
  std::optional<double> alpha1, alpha2, alpha3;
  std::vector<int> steady;       // k m
  std::vector<double> state;     // X Vx Z Vz nx ny nz
  double periods = 10.0;
  int steps = 1024;
  bool renormalize = false;
  std::string out = "trajectory.csv";
};

int cmd_simulate(const SimulateOptions& opt) {
  PointOptions alpha_source;
  alpha_source.config = opt.config;
  alpha_source.alpha1 = opt.alpha1;
  alpha_source.alpha2 = opt.alpha2;
  alpha_source.alpha3 = opt.alpha3;
  const AlphaParams a = resolve_alphas(alpha_source);

  if (opt.steady.empty() == opt.state.empty())
    throw invalid_parameter("give exactly one of --steady K M or --state X,Vx,Z,Vz,nx,ny,nz");
  NonlinearState s0;
  if (!opt.steady.empty()) {
    s0 = steady_orbit(BranchIndex{opt.steady[0], opt.steady[1]}, a).initial_state();
  } else {
    s0 = NonlinearState{.tau = 0.0, .X = opt.state[0], .Vx = opt.state[1], .Z = opt.state[2],
                        .Vz = opt.state[3], .nx = opt.state[4], .ny = opt.state[5],
                        .nz = opt.state[6]};
  }

  const std::filesystem::path out = opt.out;
  const std::filesystem::path sidecar = sibling_path(out, ".json");
  require_writable(out);
  require_writable(sidecar);

  const Trajectory traj = integrate_nonlinear(s0, a, opt.periods, opt.steps, opt.renormalize);
  io::write_file(out, io::trajectory_csv(traj));
  io::write_file(sidecar, io::trajectory_sidecar(traj).dump(2) + "\n");

  std::cout << "trajectory: " << traj.samples.size() << " samples";
  if (traj.diverged)
    std::cout << ", diverged at tau = " << io::format_double(traj.divergence_tau);
  std::cout << "\n";
  return traj.diverged ? exit_divergence : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet stability toolkit for a current-modulated magnetic waveguide"};
  app.require_subcommand(1);

  // params
  auto* params = app.add_subcommand("params", "print characteristic frequencies and alphas");
  std::string params_config;
  params->add_option("--config", params_config, "parameter file")->required();

  // point
  auto* point = app.add_subcommand("point", "stability of a single parameter point");
  PointOptions point_opt;
  std::string point_out;
  point->add_option("--config", point_opt.config, "parameter file (physical mode)");
  point->add_option("--alpha1", point_opt.alpha1, "fixed alpha1");
  point->add_option("--alpha2", point_opt.alpha2, "fixed alpha2");
  point->add_option("--alpha3", point_opt.alpha3, "fixed alpha3");
  point->add_option("--k", point_opt.branch.k, "steady-orbit index k");
  point->add_option("--m", point_opt.branch.m, "steady-orbit index m");
  point->add_option("--backend", point_opt.backend, "propagate | series");
  point->add_option("--steps", point_opt.settings.steps, "propagation steps per period");
  point->add_option("--order", point_opt.settings.order, "series order");
  point->add_option("--nodes", point_opt.settings.quadrature_nodes, "series quadrature nodes");
  point->add_option("--eps-stab", point_opt.settings.eps_stab, "stability tolerance band");
  point->add_option("--out", point_out, "also write the JSON report here");

  // scan
  auto* scan = app.add_subcommand("scan", "stability scan over a 2-D parameter grid");
  ScanOptions scan_opt;
  scan->add_option("--config", scan_opt.config, "parameter file (physical mode)");
  scan->add_option("--x", scan_opt.x_spec, "x axis quantity:scale:min:max:n");
  scan->add_option("--y", scan_opt.y_spec, "y axis quantity:scale:min:max:n");
  scan->add_option("--alpha1", scan_opt.alpha1, "fixed alpha1 (abstract mode)");
  scan->add_option("--alpha2", scan_opt.alpha2, "fixed alpha2 (abstract mode)");
  scan->add_option("--alpha3", scan_opt.alpha3, "fixed alpha3 (abstract mode)");
  scan->add_option("--k", scan_opt.branch.k, "steady-orbit index k");
  scan->add_option("--m", scan_opt.branch.m, "steady-orbit index m");
  scan->add_option("--backend", scan_opt.backend, "propagate | series");
  scan->add_option("--steps", scan_opt.settings.steps, "propagation steps per period");
  scan->add_option("--order", scan_opt.settings.order, "series order");
  scan->add_option("--nodes", scan_opt.settings.quadrature_nodes, "series quadrature nodes");
  scan->add_option("--eps-stab", scan_opt.settings.eps_stab, "stability tolerance band");
  scan->add_option("--workers", scan_opt.workers, "worker threads (0 = hardware)");
  scan->add_option("--out", scan_opt.out, "output CSV path");
  scan->add_flag("--pgm", scan_opt.pgm, "also write a quick-look PGM heatmap");
  scan->add_flag("--overlay", scan_opt.overlay, "attach the estimated upper bound curve");

  // boundary
  auto* boundary = app.add_subcommand("boundary", "estimated upper bound curve and threshold");
  std::string boundary_config, boundary_out = "boundary.csv";
  BranchIndex boundary_branch{1, 0};
  double boundary_omega_min = 0.0, boundary_omega_max = 0.0;
  int boundary_samples = 200;
  boundary->add_option("--config", boundary_config, "parameter file")->required();
  boundary->add_option("--k", boundary_branch.k, "steady-orbit index k");
  boundary->add_option("--m", boundary_branch.m, "steady-orbit index m");
  boundary->add_option("--omega-min", boundary_omega_min, "curve range start [rad/s]");
  boundary->add_option("--omega-max", boundary_omega_max, "curve range end [rad/s]");
  boundary->add_option("--samples", boundary_samples, "number of curve samples");
  boundary->add_option("--out", boundary_out, "output CSV path");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "integrate the full nonlinear dynamics");
  SimulateOptions sim_opt;
  simulate->add_option("--config", sim_opt.config, "parameter file (physical mode)");
  simulate->add_option("--alpha1", sim_opt.alpha1, "fixed alpha1");
  simulate->add_option("--alpha2", sim_opt.alpha2, "fixed alpha2");
  simulate->add_option("--alpha3", sim_opt.alpha3, "fixed alpha3");
  simulate->add_option("--steady", sim_opt.steady, "start on the steady orbit of branch K M")
      ->expected(2);
  simulate->add_option("--state", sim_opt.state, "initial state X,Vx,Z,Vz,nx,ny,nz")
      ->delimiter(',')
      ->expected(7);
  simulate->add_option("--periods", sim_opt.periods, "number of modulation periods");
  simulate->add_option("--steps", sim_opt.steps, "integrator steps per period");
  simulate->add_flag("--renormalize", sim_opt.renormalize, "rescale |n| to 1 every step");
  simulate->add_option("--out", sim_opt.out, "output CSV path");

  // verify
  auto* verify = app.add_subcommand("verify", "run the cross-module invariant checks");
  std::uint64_t verify_seed = 12345;
  double verify_eps = 1e-3;
  verify->add_option("--seed", verify_seed, "random seed");
  verify->add_option("--eps-stab", verify_eps, "stability tolerance band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (params->parsed()) return cmd_params(params_config);
    if (point->parsed()) return cmd_point(point_opt, point_out);
    if (scan->parsed()) return cmd_scan(scan_opt);
    if (boundary->parsed())
      return cmd_boundary(boundary_config, boundary_branch, boundary_omega_min,
                          boundary_omega_max, boundary_samples, boundary_out);
    if (simulate->parsed()) return cmd_simulate(sim_opt);
    if (verify->parsed()) {
      if (!(verify_eps >= 0.0)) {
        std::cerr << "error: --eps-stab must be nonnegative\n";
        return exit_usage;
      }
      return magguide::run_verification(verify_seed, verify_eps, std::cout) ? exit_ok
                                                                            : exit_checks_failed;
    }
  } catch (const magguide::invalid_parameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const magguide::numerical_failure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const magguide::singular_coordinate& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_checks_failed;
  }
  return exit_usage;
}
