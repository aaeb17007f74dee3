#include "magguide/params.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "magguide/constants.hpp"
#include "magguide/errors.hpp"

namespace magguide {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw invalid_parameter(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void SpeciesConstants::validate() const {
  require(finite_positive(mass_kg), "species mass must be positive");
  require(finite_positive(lande_g_factor), "Landé factor must be positive");
  require(finite_positive(bohr_magneton), "Bohr magneton must be positive");
  require(finite_positive(hbar), "hbar must be positive");
}

SpeciesConstants rb87_species() {
  return SpeciesConstants{
      .mass_kg = constants::rb87_mass,
      .lande_g_factor = constants::rb87_g_factor,
      .bohr_magneton = constants::bohr_magneton,
      .hbar = constants::hbar,
  };
}

std::optional<SpeciesConstants> species_by_name(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "rb87") return rb87_species();
  return std::nullopt;
}

void PhysicalParams::validate() const {
  species.validate();
  require(finite_positive(gradient_T_per_m), "field gradient must be positive");
  require(finite_positive(bias_T), "bias field must be positive");
  require(finite_positive(pitch_m), "wire pitch must be positive");
  require(finite_positive(omega_rad_s), "modulation frequency must be positive");
  require(std::isfinite(phase_rad), "phase must be finite");
}

bool PhysicalParams::phase_in_model_range() const {
  return std::abs(phase_rad) <= 0.3;
}

PhysicalParams rb87_reference_params() {
  return PhysicalParams{
      .species = rb87_species(),
      .gradient_T_per_m = 2.90,
      .bias_T = 1.5e-4,
      .phase_rad = 1.0e-3,
      .pitch_m = 15.0e-6,
      .omega_rad_s = 2.0 * std::numbers::pi * 1.0e4,
  };
}

void AlphaParams::validate() const {
  require(std::isfinite(alpha1) && alpha1 >= 0.0, "alpha1 must be nonnegative");
  require(std::isfinite(alpha2) && alpha2 >= 0.0, "alpha2 must be nonnegative");
  require(std::isfinite(alpha3), "alpha3 must be finite");
}

CharacteristicFrequencies characteristic_frequencies(const PhysicalParams& p) {
  p.validate();
  const auto& s = p.species;
  const double moment = s.lande_g_factor * s.bohr_magneton;  // g_F mu_B [J/T]
  CharacteristicFrequencies f{
      .larmor = moment * p.phase_rad * p.bias_T / s.hbar,
      .transverse = std::sqrt(moment * p.gradient_T_per_m / (s.mass_kg * p.pitch_m)),
      .rabi = moment * p.gradient_T_per_m * p.pitch_m / s.hbar,
  };
  if (!std::isfinite(f.larmor) || !std::isfinite(f.transverse) || !std::isfinite(f.rabi))
    throw invalid_parameter("characteristic frequencies overflow from degenerate inputs");
  return f;
}

AlphaParams alphas_from_physical(const PhysicalParams& p) {
  const CharacteristicFrequencies f = characteristic_frequencies(p);
  const double w = p.omega_rad_s;
  AlphaParams a{
      .alpha1 = f.transverse * f.transverse / (w * w),
      .alpha2 = f.rabi / w,
      .alpha3 = f.larmor / w,
  };
  a.validate();
  return a;
}

double omega_from_alpha_ratio(double ratio_a2_a1, const CharacteristicFrequencies& freqs) {
  if (!(std::isfinite(ratio_a2_a1) && ratio_a2_a1 > 0.0))
    throw invalid_parameter("alpha2/alpha1 ratio must be positive");
  if (!(std::isfinite(freqs.rabi) && freqs.rabi > 0.0))
    throw invalid_parameter("rabi frequency must be positive to invert the ratio");
  return ratio_a2_a1 * freqs.transverse * freqs.transverse / freqs.rabi;
}

}  // namespace magguide
