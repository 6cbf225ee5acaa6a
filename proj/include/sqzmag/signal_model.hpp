#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqzmag/gaussian.hpp"
#include "sqzmag/squeezing.hpp"

namespace sqzmag {

/// Magnetic drive seen by the vapor cell.  The ac amplitude is zero-to-peak.
struct FieldDrive {
  double dc_field_tesla = 0.0;
  double ac_amplitude_tesla = 0.0;
  double ac_frequency_hz = 0.0;
  double phase_radians = 0.0;

  void validate() const;
};

/// Which per-sample noise statistics the synthesizer draws: the linearized
/// statistics of the squeezed state, or coherent light of equal detected
/// power (the shot-noise reference with identical means and signals).
enum class NoiseMode { kSqueezed, kShotNoiseLimited };

struct MagnetometerScenario {
  FwmChain chain{};
  FieldDrive drive{};
  double rotation_gain_rad_per_tesla = 0.0; ///< kappa, > 0
  int pbs_sign_probe = +1;
  int pbs_sign_conjugate = -1;
  double classical_noise_rel_snl = 0.0; ///< white common-mode power over SNL
  double sample_rate_hz = 0.0;
  double duration_seconds = 0.0;
  std::uint64_t rng_seed = 0;
  NoiseMode noise_mode = NoiseMode::kSqueezed;

  void validate() const;
  std::size_t sample_count() const;
};

/// Balanced-analyzer photocurrent records in shot-noise-normalized units:
/// fluxes are divided by sqrt(N_p + N_c) so the difference-channel shot
/// noise density is exactly 1 per Hz.  difference[i] = probe[i] -
/// conjugate[i] for every sample.
struct PhotocurrentTraces {
  std::vector<double> probe;
  std::vector<double> conjugate;
  std::vector<double> difference;
  double sample_rate_hz = 0.0;
  std::uint64_t rng_seed = 0;
  std::string generator_version;

  /// Shot-noise density of each channel in trace units^2 per Hz.
  double snl_probe_density = 0.0;
  double snl_conjugate_density = 0.0;
  double snl_difference_density = 1.0;

  /// Post-loss mean photon fluxes (photons/s), for diagnostics.
  double mean_flux_probe = 0.0;
  double mean_flux_conjugate = 0.0;
};

/// Polarization rotation angle theta(t) = kappa * B(t) for the drive,
/// evaluated at the given times.  Throws InfeasibilityError if any |theta|
/// reaches pi/4 (outside the linear analyzer range).
std::vector<double> rotation_angle_series(const FieldDrive& drive,
                                          double rotation_gain_rad_per_tesla,
                                          std::span<const double> times_s);

/// Detected flux behind a 45 degree analyzer: flux * (1/2 + sign * theta).
std::vector<double> pbs_intensity(std::span<const double> theta,
                                  double mean_flux, int pbs_sign);

/// Rotation gain kappa such that an ac field of magnitude
/// `target_sensitivity` produces amplitude SNR 1 against the shot-noise
/// floor in a 1 Hz bandwidth.  Depends on the chain only through the total
/// detected flux.  Throws InfeasibilityError when the resulting kappa would
/// push the scenario's drive outside |theta| < 0.1.
double calibrate_rotation_gain(double target_sensitivity_t_per_sqrt_hz,
                               const MagnetometerScenario& scenario);

/// Synthesize the probe/conjugate/difference records for a scenario.
/// Per-sample noise is drawn from a counter-based generator indexed by
/// sample position, so the result is byte-identical for any worker count.
/// n_workers = 0 picks a default.
PhotocurrentTraces synthesize_traces(const MagnetometerScenario& scenario,
                                     unsigned n_workers = 0);

} // namespace sqzmag
