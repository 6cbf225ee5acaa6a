#pragma once

#include <optional>

namespace sqzmag {

/// Fundamental constants used by the physics layer (SI units).  Fixed at
/// build time; deliberately not configurable at run time so that reported
/// frequencies are reproducible bit for bit.
struct PhysicalConstants {
  double electron_charge; ///< C
  double electron_mass;   ///< kg
  double hbar;            ///< J s
  double boltzmann;       ///< J / K
};

/// CODATA 2018 values (elementary charge, h and k are exact by definition).
inline constexpr PhysicalConstants kConstants{
    1.602176634e-19,
    9.1093837015e-31,
    1.054571817e-34,
    1.380649e-23,
};

struct LarmorParams {
  double lande_g;     ///< dimensionless Lande factor, nonzero
  double field_tesla; ///< magnetic field, any sign
};

/// Electron-spin precession rate omega = e * g * B / (2 m), in rad/s.
/// The sign follows the sign of the field.
double larmor_frequency(const LarmorParams& p,
                        const PhysicalConstants& c = kConstants);

/// Inverse of larmor_frequency at fixed g: the field that precesses at
/// omega rad/s.
double field_for_larmor(double omega_rad_s, double lande_g,
                        const PhysicalConstants& c = kConstants);

/// Optical drive parameters for the generalized Rabi rate.  When both
/// dipole_moment (C m) and field_amplitude (V/m) are given they must be
/// consistent with resonant_rabi to 1e-9 relative.
struct RabiParams {
  double resonant_rabi_rad_s;          ///< on-resonance rate Omega0 >= 0
  double detuning_rad_s;               ///< laser detuning, any sign
  std::optional<double> dipole_moment; ///< C m
  std::optional<double> field_amplitude; ///< V/m

  void validate(const PhysicalConstants& c = kConstants) const;
};

/// Generalized Rabi rate sqrt(Omega0^2 + Delta^2), rad/s.
double generalized_rabi(const RabiParams& p,
                        const PhysicalConstants& c = kConstants);

/// On-resonance Rabi rate d * E0 / hbar for a transition dipole d (C m)
/// driven at field amplitude E0 (V/m).
double rabi_from_dipole(double dipole_moment_c_m, double field_amplitude_v_m,
                        const PhysicalConstants& c = kConstants);

/// Saturated vapor pressure of rubidium in Pa.  Two-branch log10 fit over
/// the solid and liquid phases; valid 250 K to 500 K.  Coefficients are
/// documented in docs/MODEL.md.
double rb_vapor_pressure_pa(double temperature_k);

/// Rubidium number density in atoms / cm^3 from the saturated vapor
/// pressure and the ideal gas law.  Valid 250 K to 500 K.
double rb_vapor_density_cm3(double temperature_k,
                            const PhysicalConstants& c = kConstants);

} // namespace sqzmag
