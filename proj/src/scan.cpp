#include "magguide/scan.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "magguide/errors.hpp"

namespace magguide {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

bool axis_is(const ScanSpec& s, ScanQuantity q) {
  return s.x.quantity == q || s.y.quantity == q;
}

int count_alpha_sources(const ScanSpec& s, ScanQuantity q, const std::optional<double>& fix) {
  return (s.x.quantity == q ? 1 : 0) + (s.y.quantity == q ? 1 : 0) + (fix.has_value() ? 1 : 0);
}

}  // namespace

std::string_view to_string(ScanQuantity q) {
  switch (q) {
    case ScanQuantity::alpha1: return "alpha1";
    case ScanQuantity::alpha2: return "alpha2";
    case ScanQuantity::alpha3: return "alpha3";
    case ScanQuantity::ratio_a2_a1: return "ratio";
    case ScanQuantity::omega: return "omega";
    case ScanQuantity::phi: return "phi";
  }
  return "?";
}

std::string_view to_string(AxisScale s) {
  return s == AxisScale::linear ? "linear" : "log";
}

std::optional<ScanQuantity> scan_quantity_from_string(std::string_view s) {
  if (s == "alpha1") return ScanQuantity::alpha1;
  if (s == "alpha2") return ScanQuantity::alpha2;
  if (s == "alpha3") return ScanQuantity::alpha3;
  if (s == "ratio" || s == "ratio_a2_a1") return ScanQuantity::ratio_a2_a1;
  if (s == "omega") return ScanQuantity::omega;
  if (s == "phi") return ScanQuantity::phi;
  return std::nullopt;
}

std::optional<AxisScale> axis_scale_from_string(std::string_view s) {
  if (s == "linear" || s == "lin") return AxisScale::linear;
  if (s == "log") return AxisScale::log;
  return std::nullopt;
}

void ScanAxis::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max))
    throw invalid_parameter("axis needs finite min < max");
  if (n < 2) throw invalid_parameter("axis needs at least 2 nodes");
  if (scale == AxisScale::log && !(min > 0.0))
    throw invalid_parameter("log axis needs min > 0");
}

double ScanAxis::value(int i) const {
  const double t = static_cast<double>(i) / (n - 1);
  if (scale == AxisScale::linear) return min + (max - min) * t;
  return std::exp(std::log(min) + (std::log(max) - std::log(min)) * t);
}

void ScanSpec::validate() const {
  x.validate();
  y.validate();
  if (x.quantity == y.quantity) throw invalid_parameter("x and y axes must differ");
  if (fixed.has_value() == physical.has_value())
    throw invalid_parameter("exactly one of abstract or physical parameter source required");
  if (settings.steps < 256) throw invalid_parameter("scans need at least 256 steps per period");
  if (settings.order < 1) throw invalid_parameter("series order must be at least 1");
  if (settings.quadrature_nodes < 129 || settings.quadrature_nodes % 2 == 0)
    throw invalid_parameter("quadrature nodes must be odd and at least 129");
  if (!(settings.eps_stab >= 0.0) || !std::isfinite(settings.eps_stab))
    throw invalid_parameter("stability tolerance must be nonnegative");
  if (workers < 0) throw invalid_parameter("worker count must be nonnegative");

  if (fixed) {
    if (axis_is(*this, ScanQuantity::omega) || axis_is(*this, ScanQuantity::phi))
      throw invalid_parameter("omega/phi axes need physical-mode parameters");
    const bool has_ratio = axis_is(*this, ScanQuantity::ratio_a2_a1);
    if (count_alpha_sources(*this, ScanQuantity::alpha1, fixed->alpha1) != 1)
      throw invalid_parameter("alpha1 must be determined exactly once");
    const int a2_sources =
        count_alpha_sources(*this, ScanQuantity::alpha2, fixed->alpha2) + (has_ratio ? 1 : 0);
    if (a2_sources != 1)
      throw invalid_parameter("alpha2 must be determined exactly once (axis, fixed, or ratio)");
    if (count_alpha_sources(*this, ScanQuantity::alpha3, fixed->alpha3) != 1)
      throw invalid_parameter("alpha3 must be determined exactly once");
  } else {
    physical->validate();
    const auto in = [&](ScanQuantity q, const ScanAxis& ax) { return ax.quantity == q; };
    const auto frequency_axis = [&](const ScanAxis& ax) {
      return in(ScanQuantity::omega, ax) || in(ScanQuantity::ratio_a2_a1, ax);
    };
    const auto phase_axis = [&](const ScanAxis& ax) {
      return in(ScanQuantity::phi, ax) || in(ScanQuantity::alpha3, ax);
    };
    const bool ok = (frequency_axis(x) && phase_axis(y)) || (frequency_axis(y) && phase_axis(x));
    if (!ok)
      throw invalid_parameter(
          "physical-mode axes must pair one of {omega, ratio} with one of {phi, alpha3}");
    const ScanAxis& freq_ax = frequency_axis(x) ? x : y;
    if (!(freq_ax.min > 0.0)) throw invalid_parameter("frequency axis needs min > 0");
  }
}

AlphaParams ScanSpec::alphas_at(double x_value, double y_value) const {
  if (fixed) {
    std::optional<double> a1 = fixed->alpha1;
    std::optional<double> a2 = fixed->alpha2;
    std::optional<double> a3 = fixed->alpha3;
    std::optional<double> ratio;
    const auto apply = [&](ScanQuantity q, double v) {
      switch (q) {
        case ScanQuantity::alpha1: a1 = v; break;
        case ScanQuantity::alpha2: a2 = v; break;
        case ScanQuantity::alpha3: a3 = v; break;
        case ScanQuantity::ratio_a2_a1: ratio = v; break;
        default: throw invalid_parameter("axis not available in abstract mode");
      }
    };
    apply(x.quantity, x_value);
    apply(y.quantity, y_value);
    if (ratio) a2 = *ratio * *a1;
    AlphaParams a{.alpha1 = *a1, .alpha2 = *a2, .alpha3 = *a3};
    a.validate();
    return a;
  }

  PhysicalParams p = *physical;
  std::optional<double> a3_override;
  const auto apply = [&](ScanQuantity q, double v) {
    switch (q) {
      case ScanQuantity::omega:
        p.omega_rad_s = v;
        break;
      case ScanQuantity::ratio_a2_a1:
        p.omega_rad_s = omega_from_alpha_ratio(v, characteristic_frequencies(*physical));
        break;
      case ScanQuantity::phi:
        p.phase_rad = v;
        break;
      case ScanQuantity::alpha3:
        a3_override = v;
        break;
      default:
        throw invalid_parameter("alpha1/alpha2 axes not available in physical mode");
    }
  };
  apply(x.quantity, x_value);
  apply(y.quantity, y_value);
  AlphaParams a = alphas_from_physical(p);
  if (a3_override) a.alpha3 = *a3_override;
  return a;
}

const ScanCell& ScanResult::at(int ix, int iy) const {
  return cells.at(static_cast<size_t>(iy) * spec.x.n + ix);
}

int ScanResult::stable_count() const {
  int c = 0;
  for (const auto& cell : cells) c += (cell.stable == 1);
  return c;
}

ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const int nx = spec.x.n;
  const int ny = spec.y.n;
  ScanResult result;
  result.spec = spec;
  result.cells.resize(static_cast<size_t>(nx) * ny);

  const auto compute_row = [&](int iy) {
    const double yv = spec.y.value(iy);
    for (int ix = 0; ix < nx; ++ix) {
      ScanCell& cell = result.cells[static_cast<size_t>(iy) * nx + ix];
      cell.x = spec.x.value(ix);
      cell.y = yv;
      cell.alphas = AlphaParams{nan_value, nan_value, nan_value};
      cell.max_modulus = nan_value;
      cell.stable = -1;
      try {
        cell.alphas = spec.alphas_at(cell.x, cell.y);
        const MonodromyResult mono =
            monodromy(LinearizedSystem{cell.alphas, spec.branch}, spec.backend, spec.settings);
        cell.max_modulus = mono.max_modulus;
        cell.stable = mono.stable ? 1 : 0;
      } catch (const std::exception&) {
        // node failure recorded in place; scan continues
      }
    }
  };

  int workers = spec.workers > 0
                    ? spec.workers
                    : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  workers = std::min(workers, ny);
  if (workers <= 1) {
    for (int iy = 0; iy < ny; ++iy) compute_row(iy);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (int iy = t; iy < ny; iy += workers) compute_row(iy);
      });
    for (auto& th : pool) th.join();
  }

  for (const auto& cell : result.cells) result.failed_nodes += (cell.stable == -1);
  result.warning = result.failed_nodes * 100 > static_cast<int>(result.cells.size());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

SymmetryReport symmetry_check(const ScanSpec& spec_a, const ScanSpec& spec_b) {
  spec_a.validate();
  spec_b.validate();
  const auto same_axis = [](const ScanAxis& p, const ScanAxis& q) {
    return p.quantity == q.quantity && p.scale == q.scale && p.min == q.min && p.max == q.max &&
           p.n == q.n;
  };
  if (!same_axis(spec_a.x, spec_b.x)) throw invalid_parameter("x axes differ");

  bool mirrored = false;
  if (!same_axis(spec_a.y, spec_b.y)) {
    const ScanAxis& p = spec_a.y;
    const ScanAxis& q = spec_b.y;
    mirrored = p.quantity == q.quantity && p.scale == AxisScale::linear &&
               q.scale == AxisScale::linear && p.n == q.n && p.min == -q.max && p.max == -q.min;
    if (!mirrored) throw invalid_parameter("y axes neither identical nor sign-mirrored");
  }

  const ScanResult a = run_scan(spec_a);
  const ScanResult b = run_scan(spec_b);
  SymmetryReport report;
  const int nx = spec_a.x.n;
  const int ny = spec_a.y.n;
  for (int iy = 0; iy < ny; ++iy) {
    const int jy = mirrored ? ny - 1 - iy : iy;
    for (int ix = 0; ix < nx; ++ix) {
      ++report.total;
      report.matches += (a.at(ix, iy).stable == b.at(ix, jy).stable);
    }
  }
  return report;
}

ScanResult overlay_bound(ScanResult result, const BoundCurve& curve) {
  const ScanSpec& spec = result.spec;
  const auto coordinate = [&](const BoundCurveSample& s, ScanQuantity q) -> double {
    switch (q) {
      case ScanQuantity::alpha1: return s.alphas.alpha1;
      case ScanQuantity::alpha2: return s.alphas.alpha2;
      case ScanQuantity::alpha3: return s.alphas.alpha3;
      case ScanQuantity::ratio_a2_a1: return s.alphas.alpha2 / s.alphas.alpha1;
      case ScanQuantity::omega: return s.omega;
      case ScanQuantity::phi: {
        if (!spec.physical)
          throw invalid_parameter("phi coordinate of the bound needs physical-mode parameters");
        const SpeciesConstants& sp = spec.physical->species;
        return s.omega_L * sp.hbar / (sp.lande_g_factor * sp.bohr_magneton * spec.physical->bias_T);
      }
    }
    throw invalid_parameter("unknown scan quantity");
  };

  OverlayInfo overlay;
  for (const BoundCurveSample& s : curve.samples) {
    const double cx = coordinate(s, spec.x.quantity);
    const double cy = coordinate(s, spec.y.quantity);
    overlay.curve_xy.emplace_back(cx, cy);
    if (cx >= spec.x.min && cx <= spec.x.max && cy >= spec.y.min && cy <= spec.y.max)
      overlay.in_window = true;
  }
  if (!overlay.in_window) overlay.curve_xy.clear();

  // "Beyond" uses the on-the-bound alpha3 at each cell's own alpha1*alpha2,
  // so grid cells are compared against the exact curve, not an interpolation.
  int stable = 0;
  int beyond = 0;
  const int side = parity_sign(curve.branch.k + 1);
  for (const ScanCell& cell : result.cells) {
    if (cell.stable != 1) continue;
    ++stable;
    const double edge = bound_alpha3(cell.alphas.alpha1 * cell.alphas.alpha2, curve.branch);
    if (side * (cell.alphas.alpha3 - edge) > 0.0) ++beyond;
  }
  overlay.stable_beyond_fraction = stable > 0 ? static_cast<double>(beyond) / stable : 0.0;
  result.overlay = std::move(overlay);
  return result;
}

}  // namespace magguide
