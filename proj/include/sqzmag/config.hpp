#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqzmag/gaussian.hpp"
#include "sqzmag/signal_model.hpp"
#include "sqzmag/spectral.hpp"

namespace sqzmag {

// Free-form apparatus descriptors carried through to reports.  None of these
// affect the simulation; they document the bench configuration a run is meant
// to emulate.
struct ApparatusMetadata {
  std::optional<double> pump_power_mw;
  std::optional<double> probe_power_uw;
  std::optional<double> cell_length_inches;
  std::optional<double> temperature_celsius;
  std::optional<double> beam_angle_mrad;
  std::optional<double> probe_offset_mhz;
  std::optional<double> conjugate_offset_mhz;
  std::optional<double> dc_residual_ut_max;
  std::optional<double> cell_transmission;
};

// Field-amplitude sweep request: every amplitude is run twice (squeezed and
// shot-noise-limited) with pairwise-matched noise seeds.
struct SweepSpec {
  std::vector<double> amplitudes_tesla;
};

// Fully resolved run description.  All frequencies here are *physical* (lab)
// values; `frequency_scale` maps them onto the cheaper simulation grid, see
// scenario() / simulated_spectrum().
struct ExperimentConfig {
  std::string preset_name;  // empty when built from scratch

  FwmChain chain{1.0, 1.0, 1.0, 1.0};
  FieldDrive drive;

  // Exactly one of these must be set: either the polarimeter gain is known,
  // or it is calibrated so the shot-noise-limited sensitivity equals the
  // target.
  std::optional<double> rotation_gain_rad_per_tesla;
  std::optional<double> calibration_target_t_per_sqrt_hz;

  int pbs_sign_probe = +1;
  int pbs_sign_conjugate = -1;
  double classical_noise_rel_snl = 0.0;

  double sample_rate_hz = 0.0;  // physical
  double duration_seconds = 0.0;
  std::uint64_t rng_seed = 1;
  NoiseMode noise_mode = NoiseMode::kSqueezed;

  // All drive/sampling/analysis frequencies are divided by this factor before
  // simulation.  Statistics of the quadrature noise are white, so the noise
  // densities relative to shot noise -- and therefore every reported dB and
  // sensitivity figure -- are invariant under the rescaling; it only shrinks
  // the number of samples needed to cover a given resolution bandwidth.
  double frequency_scale = 1.0;

  SpectrumConfig spectrum;  // center/span physical, rbw/vbw absolute
  std::vector<TraceChannel> channels{TraceChannel::kDifference};

  std::optional<SweepSpec> sweep;
  ApparatusMetadata metadata;

  // Annotation lines ("#:" comments) collected from the preset and the user
  // file, echoed into reports.
  std::vector<std::string> annotations;

  // Cross-field consistency checks (beyond per-struct validate()).  Throws
  // ConfigError / InfeasibilityError / DomainError.
  void validate() const;

  // Scenario on the simulation grid with the given polarimeter gain.
  MagnetometerScenario scenario(double rotation_gain) const;

  // Spectrum request on the simulation grid.
  SpectrumConfig simulated_spectrum() const;

  // The polarimeter gain: explicit value, or calibrated from the target.
  double resolve_rotation_gain() const;
};

// Parses the sectioned key = value format.  `source_name` labels error
// messages ("file:line: ...").  A `preset = <name>` line loads the named
// built-in preset first; keys in the user text override preset keys.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace sqzmag
