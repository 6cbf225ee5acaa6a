#include "sqzmag/harness.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "sqzmag/errors.hpp"
#include "sqzmag/squeezing.hpp"

namespace sqzmag {
namespace {

ChannelResult analyze_channel(const PhotocurrentTraces& traces, const SpectrumConfig& spectrum,
                              const MagnetometerScenario& scenario, TraceChannel channel) {
  ChannelResult result;
  result.channel = channel;
  result.spectrum = estimate_psd(traces, spectrum, channel);

  bool has_tone = scenario.drive.ac_amplitude_tesla > 0;
  std::optional<double> tone;
  if (has_tone) tone = scenario.drive.ac_frequency_hz;

  result.floor_db_rel_snl = floor_db_rel_snl(result.spectrum, tone);
  if (has_tone) {
    result.tone_snr_db = tone_snr(result.spectrum, *tone);
    try {
      result.sensitivity = extract_sensitivity(result.spectrum, scenario.drive);
    } catch (const MetrologyError& e) {
      result.metrology_note = e.what();
    }
  }
  return result;
}

}  // namespace

ScenarioRun run_scenario(const ExperimentConfig& config, unsigned n_workers) {
  config.validate();

  ScenarioRun run;
  run.config = config;
  run.rotation_gain_rad_per_tesla = config.resolve_rotation_gain();
  run.scenario = config.scenario(run.rotation_gain_rad_per_tesla);
  run.spectrum_config = config.simulated_spectrum();

  run.expected_noise_rel_snl =
      config.noise_mode == NoiseMode::kSqueezed
          ? intensity_difference_noise_ratio(fwm_output_state(config.chain))
          : 1.0;

  run.traces = synthesize_traces(run.scenario, n_workers);
  for (TraceChannel channel : config.channels)
    run.channels.push_back(analyze_channel(run.traces, run.spectrum_config, run.scenario, channel));
  return run;
}

SweepResult run_sweep(const ExperimentConfig& config, unsigned n_workers) {
  config.validate();
  if (!config.sweep)
    throw ConfigError("config has no [sweep] section");

  SweepResult result;
  result.config = config;
  result.rotation_gain_rad_per_tesla = config.resolve_rotation_gain();

  const std::vector<double>& amplitudes = config.sweep->amplitudes_tesla;

  auto run_point = [&](std::size_t index) {
    SweepPoint point;
    point.applied_field_tesla = amplitudes[index];

    ExperimentConfig point_config = config;
    point_config.sweep.reset();
    point_config.drive.ac_amplitude_tesla = amplitudes[index];
    point_config.rng_seed = config.rng_seed + index;
    point_config.channels = {TraceChannel::kDifference};
    // Pin the polarimeter gain so every point shares the calibration.
    point_config.rotation_gain_rad_per_tesla = result.rotation_gain_rad_per_tesla;
    point_config.calibration_target_t_per_sqrt_hz.reset();

    double nan = std::numeric_limits<double>::quiet_NaN();
    for (NoiseMode mode : {NoiseMode::kShotNoiseLimited, NoiseMode::kSqueezed}) {
      point_config.noise_mode = mode;
      ScenarioRun run = run_scenario(point_config, 1);
      const ChannelResult& ch = run.channels.front();
      double snr = ch.tone_snr_db.value_or(nan);
      double sens = ch.sensitivity ? ch.sensitivity->sensitivity_t_per_sqrt_hz : nan;
      if (!ch.metrology_note.empty()) {
        if (!point.note.empty()) point.note += "; ";
        point.note += (mode == NoiseMode::kSqueezed ? "squeezed: " : "snl: ") + ch.metrology_note;
      }
      if (mode == NoiseMode::kSqueezed) {
        point.snr_squeezed_db = snr;
        point.sensitivity_squeezed_t_per_sqrt_hz = sens;
      } else {
        point.snr_snl_db = snr;
        point.sensitivity_snl_t_per_sqrt_hz = sens;
      }
    }
    return point;
  };

  unsigned hw = std::thread::hardware_concurrency();
  unsigned workers = n_workers ? n_workers : std::min(hw ? hw : 1u, 4u);

  result.points.resize(amplitudes.size());
  if (workers <= 1 || amplitudes.size() <= 1) {
    for (std::size_t i = 0; i < amplitudes.size(); ++i) result.points[i] = run_point(i);
  } else {
    std::vector<std::future<SweepPoint>> futures;
    futures.reserve(amplitudes.size());
    for (std::size_t i = 0; i < amplitudes.size(); ++i)
      futures.push_back(std::async(std::launch::async, run_point, i));
    for (std::size_t i = 0; i < amplitudes.size(); ++i) result.points[i] = futures[i].get();
  }
  return result;
}

}  // namespace sqzmag
