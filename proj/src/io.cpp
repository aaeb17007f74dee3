#include "magguide/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "magguide/constants.hpp"
#include "magguide/errors.hpp"

namespace magguide::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

json axis_json(const ScanAxis& axis) {
  return json{{"quantity", to_string(axis.quantity)},
              {"scale", to_string(axis.scale)},
              {"min", axis.min},
              {"max", axis.max},
              {"n", axis.n}};
}

json species_json(const SpeciesConstants& s) {
  return json{{"mass_kg", s.mass_kg}, {"g_F", s.lande_g_factor}};
}

json physical_json(const PhysicalParams& p) {
  return json{{"species", species_json(p.species)},
              {"gradient_T_per_m", p.gradient_T_per_m},
              {"bias_T", p.bias_T},
              {"phi_rad", p.phase_rad},
              {"pitch_m", p.pitch_m},
              {"omega_rad_s", p.omega_rad_s}};
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  const std::string_view t = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw invalid_parameter("not a number: '" + std::string(text) + "'");
  return value;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "tau,X,Vx,Z,Vz,nx,ny,nz\n";
  for (const NonlinearState& s : traj.samples)
    append_row(out, {s.tau, s.X, s.Vx, s.Z, s.Vz, s.nx, s.ny, s.nz});
  return out;
}

json trajectory_sidecar(const Trajectory& traj) {
  json j{{"rows", traj.samples.size()}, {"diverged", traj.diverged}};
  if (traj.diverged) {
    j["divergence_tau"] = traj.divergence_tau;
    j["note"] = "trajectory truncated at divergence";
  }
  return j;
}

std::string scan_csv(const ScanResult& result) {
  std::string out = "x,y,alpha1,alpha2,alpha3,max_modulus,stable\n";
  for (const ScanCell& c : result.cells) {
    out += format_double(c.x);
    out += ',';
    out += format_double(c.y);
    out += ',';
    out += format_double(c.alphas.alpha1);
    out += ',';
    out += format_double(c.alphas.alpha2);
    out += ',';
    out += format_double(c.alphas.alpha3);
    out += ',';
    out += format_double(c.max_modulus);
    out += ',';
    if (c.stable >= 0) out += (c.stable == 1 ? '1' : '0');
    out += '\n';
  }
  return out;
}

json scan_sidecar(const ScanResult& result) {
  const ScanSpec& spec = result.spec;
  json spec_json{{"mode", spec.fixed ? "abstract" : "physical"},
                 {"x", axis_json(spec.x)},
                 {"y", axis_json(spec.y)}};
  if (spec.fixed) {
    json fixed = json::object();
    if (spec.fixed->alpha1) fixed["alpha1"] = *spec.fixed->alpha1;
    if (spec.fixed->alpha2) fixed["alpha2"] = *spec.fixed->alpha2;
    if (spec.fixed->alpha3) fixed["alpha3"] = *spec.fixed->alpha3;
    spec_json["fixed"] = fixed;
  } else {
    spec_json["physical"] = physical_json(*spec.physical);
  }
  spec_json["branch"] = json{{"k", spec.branch.k}, {"m", spec.branch.m}};
  spec_json["backend"] = backend_name(spec.backend);
  spec_json["steps"] = spec.settings.steps;
  spec_json["order"] = spec.settings.order;
  spec_json["quadrature_nodes"] = spec.settings.quadrature_nodes;
  spec_json["eps_stab"] = spec.settings.eps_stab;
  spec_json["workers"] = spec.workers;

  json j{{"spec", spec_json},
         {"result", json{{"total_nodes", result.cells.size()},
                         {"stable_nodes", result.stable_count()},
                         {"failed_nodes", result.failed_nodes},
                         {"warning", result.warning},
                         {"wall_seconds", result.wall_seconds}}}};
  if (result.overlay) {
    json points = json::array();
    for (const auto& [px, py] : result.overlay->curve_xy) points.push_back(json::array({px, py}));
    j["overlay"] = json{{"label", "estimated upper bound"},
                        {"stable_beyond_fraction", result.overlay->stable_beyond_fraction},
                        {"in_window", result.overlay->in_window},
                        {"curve", points}};
  } else {
    j["overlay"] = nullptr;
  }
  return j;
}

std::string scan_pgm(const ScanResult& result) {
  const int nx = result.spec.x.n;
  const int ny = result.spec.y.n;
  std::string out = "P2\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
  for (int iy = ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int8_t flag = result.at(ix, iy).stable;
      out += (flag == 1 ? "255" : flag == 0 ? "0" : "128");
      out += (ix + 1 == nx ? '\n' : ' ');
    }
  }
  return out;
}

std::string boundary_csv(const BoundCurve& curve) {
  std::string out = "omega_rad_s,omega_L_rad_s,alpha1,alpha2,alpha3\n";
  for (const BoundCurveSample& s : curve.samples)
    append_row(out, {s.omega, s.omega_L, s.alphas.alpha1, s.alphas.alpha2, s.alphas.alpha3});
  return out;
}

json boundary_sidecar(const BoundCurve& curve) {
  return json{{"label", "estimated upper bound"},
              {"branch", json{{"k", curve.branch.k}, {"m", curve.branch.m}}},
              {"threshold_omega_rad_s", curve.threshold_omega},
              {"threshold_alpha_ratio", threshold_alpha_ratio(curve.freqs)},
              {"samples", curve.samples.size()},
              {"feasible", !curve.samples.empty()}};
}

json point_report(const MonodromyResult& result, const LinearizedSystem& sys) {
  json mults = json::array();
  for (const auto& lambda : result.multipliers)
    mults.push_back(json::array({lambda.real(), lambda.imag()}));
  return json{{"alphas", json{{"alpha1", sys.alphas.alpha1},
                              {"alpha2", sys.alphas.alpha2},
                              {"alpha3", sys.alphas.alpha3}}},
              {"branch", json{{"k", sys.branch.k}, {"m", sys.branch.m}}},
              {"backend", backend_name(result.backend)},
              {"order_or_steps", result.order_or_steps},
              {"multipliers", mults},
              {"max_modulus", result.max_modulus},
              {"det_residual", result.det_residual},
              {"stable", result.stable}};
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::propagation ? "propagation" : "series";
}

PhysicalParams parse_params_text(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw invalid_parameter("parameter file line " + std::to_string(lineno) +
                              ": expected 'key = value'");
    const std::string key{trim(sv.substr(0, eq))};
    const std::string value{trim(sv.substr(eq + 1))};
    if (key.empty() || value.empty())
      throw invalid_parameter("parameter file line " + std::to_string(lineno) +
                              ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw invalid_parameter("parameter file: duplicate key '" + key + "'");
  }

  static constexpr const char* known[] = {"species",  "mass_kg", "g_F",        "gradient_T_per_m",
                                          "bias_T",   "phi_rad", "pitch_m",    "omega_rad_s"};
  for (const auto& [key, value] : kv) {
    if (std::none_of(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }))
      throw invalid_parameter("parameter file: unknown key '" + key + "'");
  }

  SpeciesConstants species{.mass_kg = 0.0,
                           .lande_g_factor = 0.0,
                           .bohr_magneton = constants::bohr_magneton,
                           .hbar = constants::hbar};
  if (const auto it = kv.find("species"); it != kv.end()) {
    const auto looked_up = species_by_name(it->second);
    if (!looked_up) throw invalid_parameter("unknown species '" + it->second + "'");
    species = *looked_up;
  }
  if (const auto it = kv.find("mass_kg"); it != kv.end())
    species.mass_kg = parse_double(it->second);
  if (const auto it = kv.find("g_F"); it != kv.end())
    species.lande_g_factor = parse_double(it->second);
  if (species.mass_kg == 0.0 || species.lande_g_factor == 0.0)
    throw invalid_parameter("parameter file: need species, or both mass_kg and g_F");

  const auto require_value = [&](const char* key) -> double {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw invalid_parameter(std::string("parameter file: missing key '") + key + "'");
    return parse_double(it->second);
  };

  PhysicalParams p{.species = species,
                   .gradient_T_per_m = require_value("gradient_T_per_m"),
                   .bias_T = require_value("bias_T"),
                   .phase_rad = require_value("phi_rad"),
                   .pitch_m = require_value("pitch_m"),
                   .omega_rad_s = require_value("omega_rad_s")};
  p.validate();
  return p;
}

PhysicalParams parse_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_parameter("cannot read parameter file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_params_text(buffer.str());
}

bool probe_writable(const std::filesystem::path& path) {
  std::error_code ec;
  const bool existed = std::filesystem::exists(path, ec);
  {
    std::ofstream probe(path, std::ios::app);
    if (!probe.is_open()) return false;
  }
  if (!existed) std::filesystem::remove(path, ec);
  return true;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out.good()) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace magguide::io
