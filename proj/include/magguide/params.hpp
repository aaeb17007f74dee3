#pragma once

#include <optional>
#include <string_view>

namespace magguide {

// Atomic species data entering the characteristic frequencies.
struct SpeciesConstants {
  double mass_kg;         // atom mass [kg]
  double lande_g_factor;  // Landé factor of the guided manifold
  double bohr_magneton;   // [J/T]
  double hbar;            // [J s]

  void validate() const;  // all fields strictly positive
};

// 87Rb in the F=2 ground-state manifold (g_F = 1/2), CODATA-2018 constants.
[[nodiscard]] SpeciesConstants rb87_species();

// Case-insensitive lookup; currently only "Rb87" / "rb87".
[[nodiscard]] std::optional<SpeciesConstants> species_by_name(std::string_view name);

// Hardware parameters of the modulated three-wire guide.
struct PhysicalParams {
  SpeciesConstants species;
  double gradient_T_per_m;  // transverse field gradient b [T/m]
  double bias_T;            // wire bias field amplitude B_b [T]
  double phase_rad;         // current phase offset, source of the offset field
  double pitch_m;           // wire separation l [m]
  double omega_rad_s;       // current modulation frequency [rad/s]

  void validate() const;  // gradient, bias, pitch, omega strictly positive

  // The offset-field model assumes a small phase; above ~0.3 rad callers
  // should warn. Not an error: the equations stay evaluable.
  [[nodiscard]] bool phase_in_model_range() const;
};

// Reference configuration used throughout tests and docs: b = 2.90 T/m,
// l = 15 um, B_b = 1.5e-4 T, phase 1e-3 rad, omega = 2*pi*10 kHz.
[[nodiscard]] PhysicalParams rb87_reference_params();

struct CharacteristicFrequencies {
  double larmor;      // spin precession rate in the offset field [rad/s], sign of phase
  double transverse;  // harmonic confinement scale [rad/s]
  double rabi;        // gradient coupling rate across the pitch [rad/s]
};

// Dimensionless parameters of the dynamics; ratios of the characteristic
// frequencies to the modulation frequency.
struct AlphaParams {
  double alpha1;  // transverse^2 / omega^2
  double alpha2;  // rabi / omega
  double alpha3;  // larmor / omega, sign of phase

  // alpha1, alpha2 nonnegative and all finite. Zero is the decoupled limit,
  // allowed; values derived from PhysicalParams are strictly positive.
  void validate() const;
};

[[nodiscard]] CharacteristicFrequencies characteristic_frequencies(const PhysicalParams& p);
[[nodiscard]] AlphaParams alphas_from_physical(const PhysicalParams& p);

// Inverts alpha2/alpha1 = rabi * omega / transverse^2 for omega, so scan axes
// expressed as the ratio can be labeled in physical units.
[[nodiscard]] double omega_from_alpha_ratio(double ratio_a2_a1,
                                            const CharacteristicFrequencies& freqs);

}  // namespace magguide
