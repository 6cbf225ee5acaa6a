#include "sqzmag/physics.hpp"

#include <cmath>
#include <string>

#include "sqzmag/errors.hpp"

namespace sqzmag {

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

} // namespace

double larmor_frequency(const LarmorParams& p, const PhysicalConstants& c) {
  require_finite(p.lande_g, "lande_g");
  require_finite(p.field_tesla, "field_tesla");
  if (p.lande_g == 0.0) {
    throw DomainError("lande_g must be nonzero");
  }
  return c.electron_charge * p.lande_g * p.field_tesla /
         (2.0 * c.electron_mass);
}

double field_for_larmor(double omega_rad_s, double lande_g,
                        const PhysicalConstants& c) {
  require_finite(omega_rad_s, "omega_rad_s");
  require_finite(lande_g, "lande_g");
  if (lande_g == 0.0) {
    throw DomainError("lande_g must be nonzero");
  }
  return 2.0 * c.electron_mass * omega_rad_s /
         (c.electron_charge * lande_g);
}

void RabiParams::validate(const PhysicalConstants& c) const {
  require_finite(resonant_rabi_rad_s, "resonant_rabi_rad_s");
  require_finite(detuning_rad_s, "detuning_rad_s");
  if (resonant_rabi_rad_s < 0.0) {
    throw DomainError("resonant_rabi_rad_s must be >= 0");
  }
  if (dipole_moment.has_value() != field_amplitude.has_value()) {
    throw DomainError("dipole_moment and field_amplitude must be given together");
  }
  if (dipole_moment && field_amplitude) {
    const double derived = rabi_from_dipole(*dipole_moment, *field_amplitude, c);
    const double scale = std::max(std::abs(derived), std::abs(resonant_rabi_rad_s));
    if (scale > 0.0 && std::abs(derived - resonant_rabi_rad_s) > 1e-9 * scale) {
      throw DomainError("resonant_rabi_rad_s inconsistent with dipole_moment * field_amplitude / hbar");
    }
  }
}

double generalized_rabi(const RabiParams& p, const PhysicalConstants& c) {
  p.validate(c);
  return std::hypot(p.resonant_rabi_rad_s, p.detuning_rad_s);
}

double rabi_from_dipole(double dipole_moment_c_m, double field_amplitude_v_m,
                        const PhysicalConstants& c) {
  require_finite(dipole_moment_c_m, "dipole_moment");
  require_finite(field_amplitude_v_m, "field_amplitude");
  if (dipole_moment_c_m < 0.0 || field_amplitude_v_m < 0.0) {
    throw DomainError("dipole moment and field amplitude must be >= 0");
  }
  return dipole_moment_c_m * field_amplitude_v_m / c.hbar;
}

// Saturated-vapor-pressure fit, log10(P/torr) as a function of T/K, with a
// solid branch below the 312.45 K melting point and a liquid branch above.
// The two branches agree to 0.3% at the melting point.  Coefficients are
// reproduced in docs/MODEL.md.
double rb_vapor_pressure_pa(double temperature_k) {
  require_finite(temperature_k, "temperature_k");
  if (temperature_k < 250.0 || temperature_k > 500.0) {
    throw DomainError("temperature out of fit range [250 K, 500 K]");
  }
  constexpr double kMeltingPointK = 312.45;
  constexpr double kTorrToPa = 133.32236842105263;
  const double t = temperature_k;
  double log10_torr;
  if (t < kMeltingPointK) {
    log10_torr = -94.04826 - 1961.258 / t - 0.03771687 * t +
                 42.57526 * std::log10(t);
  } else {
    log10_torr = 15.88253 - 4529.635 / t + 0.00058663 * t -
                 2.99138 * std::log10(t);
  }
  return kTorrToPa * std::pow(10.0, log10_torr);
}

double rb_vapor_density_cm3(double temperature_k, const PhysicalConstants& c) {
  const double pressure_pa = rb_vapor_pressure_pa(temperature_k);
  const double per_m3 = pressure_pa / (c.boltzmann * temperature_k);
  return per_m3 * 1e-6;
}

} // namespace sqzmag
