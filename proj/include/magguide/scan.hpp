#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "magguide/bounds.hpp"
#include "magguide/floquet.hpp"
#include "magguide/params.hpp"

namespace magguide {

enum class ScanQuantity { alpha1, alpha2, alpha3, ratio_a2_a1, omega, phi };
enum class AxisScale { linear, log };

[[nodiscard]] std::string_view to_string(ScanQuantity q);
[[nodiscard]] std::string_view to_string(AxisScale s);
[[nodiscard]] std::optional<ScanQuantity> scan_quantity_from_string(std::string_view s);
[[nodiscard]] std::optional<AxisScale> axis_scale_from_string(std::string_view s);

struct ScanAxis {
  ScanQuantity quantity = ScanQuantity::ratio_a2_a1;
  AxisScale scale = AxisScale::linear;
  double min = 0.0;
  double max = 1.0;
  int n = 2;

  void validate() const;  // min < max, n >= 2, log scale needs min > 0

  // Node coordinate; a pure function of (i, axis) so grids are reproducible
  // bit-for-bit and a 2x-refined grid hits the coarse nodes exactly.
  [[nodiscard]] double value(int i) const;
};

// Non-axis alpha values for abstract-mode scans.
struct FixedAlphas {
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  std::optional<double> alpha3;
};

struct ScanSpec {
  ScanAxis x;
  ScanAxis y;
  // Exactly one of the two must be set. Abstract mode: axes plus fixed values
  // must determine (alpha1, alpha2, alpha3) exactly once each; a ratio axis
  // requires a fixed alpha1; omega/phi axes are unavailable. Physical mode:
  // axes from {omega, ratio_a2_a1} x {phi, alpha3}; alpha1/alpha2 axes are
  // unavailable (they are derived quantities).
  std::optional<FixedAlphas> fixed;
  std::optional<PhysicalParams> physical;
  BranchIndex branch;
  Backend backend = Backend::propagation;
  MonodromySettings settings;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;

  // Resolves the alpha triple at one grid node.
  [[nodiscard]] AlphaParams alphas_at(double x_value, double y_value) const;
};

struct ScanCell {
  double x = 0.0;
  double y = 0.0;
  AlphaParams alphas{};
  double max_modulus = 0.0;  // NaN when the node failed
  int8_t stable = -1;        // 1 stable, 0 unstable, -1 failed
};

struct OverlayInfo {
  // Bound curve in scan coordinates, one point per convertible curve sample.
  std::vector<std::pair<double, double>> curve_xy;
  // Fraction of stable cells strictly beyond the bound (above it for odd k,
  // mirrored below for even k); 0 when there are no stable cells.
  double stable_beyond_fraction = 0.0;
  bool in_window = false;  // any curve point inside the scan rectangle
};

struct ScanResult {
  ScanSpec spec;
  std::vector<ScanCell> cells;  // row-major, x fastest
  int failed_nodes = 0;
  bool warning = false;  // more than 1% of nodes failed
  double wall_seconds = 0.0;
  std::optional<OverlayInfo> overlay;

  [[nodiscard]] const ScanCell& at(int ix, int iy) const;
  [[nodiscard]] int stable_count() const;
};

// Evaluates stability on the full grid. Node computations are pure and are
// distributed row-wise over a worker pool into disjoint output slots, so the
// result is identical for any worker count. Node failures are recorded
// in-place and the scan continues.
[[nodiscard]] ScanResult run_scan(const ScanSpec& spec);

struct SymmetryReport {
  int total = 0;
  int matches = 0;
  [[nodiscard]] bool pass() const { return total > 0 && matches == total; }
  [[nodiscard]] double match_fraction() const {
    return total > 0 ? static_cast<double>(matches) / total : 0.0;
  }
};

// Runs both scans and compares stability flags cell-by-cell. The grids must
// have identical x axes and either identical y axes or sign-mirrored alpha3
// y axes (min/max negated and swapped), in which case rows are matched in
// reversed order.
[[nodiscard]] SymmetryReport symmetry_check(const ScanSpec& spec_a, const ScanSpec& spec_b);

// Attaches the bound curve in scan coordinates and computes the fraction of
// stable cells strictly beyond it. Requires every axis quantity to be
// computable from a curve sample (phi additionally needs the scan to be in
// physical mode).
[[nodiscard]] ScanResult overlay_bound(ScanResult result, const BoundCurve& curve);

}  // namespace magguide
