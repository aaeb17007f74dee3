#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "magguide/bounds.hpp"
#include "magguide/floquet.hpp"
#include "magguide/guide_model.hpp"
#include "magguide/scan.hpp"

namespace magguide::io {

using json = nlohmann::ordered_json;

// Shortest decimal representation that round-trips the exact double.
// Non-finite values become "nan", "inf", "-inf".
[[nodiscard]] std::string format_double(double v);

// Strict full-string parse; throws invalid_parameter on trailing garbage.
[[nodiscard]] double parse_double(std::string_view text);

[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);
[[nodiscard]] json trajectory_sidecar(const Trajectory& traj);

[[nodiscard]] std::string scan_csv(const ScanResult& result);
[[nodiscard]] json scan_sidecar(const ScanResult& result);
// Plain-text grayscale pixmap: 0 = unstable, 255 = stable, 128 = failed,
// rows top-down with the largest y value first (north-up).
[[nodiscard]] std::string scan_pgm(const ScanResult& result);

[[nodiscard]] std::string boundary_csv(const BoundCurve& curve);
[[nodiscard]] json boundary_sidecar(const BoundCurve& curve);

[[nodiscard]] json point_report(const MonodromyResult& result, const LinearizedSystem& sys);

[[nodiscard]] std::string_view backend_name(Backend backend);

// Flat key-value parameter file; '#' starts a comment. Keys: species,
// mass_kg, g_F, gradient_T_per_m, bias_T, phi_rad, pitch_m, omega_rad_s.
// "species = Rb87" expands mass_kg and g_F defaults; explicit keys override.
[[nodiscard]] PhysicalParams parse_params_file(const std::filesystem::path& path);
[[nodiscard]] PhysicalParams parse_params_text(std::string_view text);

// True when the path can be created/appended; used to fail before compute.
[[nodiscard]] bool probe_writable(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace magguide::io
