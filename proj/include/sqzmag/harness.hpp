#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqzmag/config.hpp"
#include "sqzmag/spectral.hpp"

namespace sqzmag {

/// Spectrum and tone metrology for one analyzed channel.
struct ChannelResult {
  TraceChannel channel = TraceChannel::kDifference;
  NoiseSpectrum spectrum;
  double floor_db_rel_snl = 0.0;
  std::optional<double> tone_snr_db;            ///< set when the drive has a tone
  std::optional<SensitivityReport> sensitivity; ///< set when the tone is measurable
  std::string metrology_note;                   ///< why sensitivity is absent
};

/// One synthesized scenario with its analyzed channels.
struct ScenarioRun {
  ExperimentConfig config;
  MagnetometerScenario scenario;     ///< on the simulation grid
  SpectrumConfig spectrum_config;    ///< on the simulation grid
  double rotation_gain_rad_per_tesla = 0.0;
  double expected_noise_rel_snl = 1.0; ///< model density for the difference channel
  PhotocurrentTraces traces;
  std::vector<ChannelResult> channels;
};

/// Parses, calibrates, synthesizes, and analyzes.  Throws ConfigError /
/// InfeasibilityError for bad requests; metrology failures on individual
/// channels are recorded in the results rather than thrown.
ScenarioRun run_scenario(const ExperimentConfig& config, unsigned n_workers = 0);

/// One amplitude of a sweep: the same seed drives the squeezed run and its
/// shot-noise-limited twin, so the quantum advantage is read off directly.
struct SweepPoint {
  double applied_field_tesla = 0.0;
  double snr_snl_db = 0.0;
  double snr_squeezed_db = 0.0;
  /// NaN when the tone fell below the detection threshold.
  double sensitivity_snl_t_per_sqrt_hz = 0.0;
  double sensitivity_squeezed_t_per_sqrt_hz = 0.0;
  std::string note;
};

struct SweepResult {
  ExperimentConfig config;
  double rotation_gain_rad_per_tesla = 0.0;
  std::vector<SweepPoint> points;
};

/// Runs the config's [sweep] amplitudes on the difference channel.  Point i
/// uses seed rng_seed + i for both members of the pair.
SweepResult run_sweep(const ExperimentConfig& config, unsigned n_workers = 0);

}  // namespace sqzmag
