#include "sqzmag/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "sqzmag/errors.hpp"
#include "sqzmag/version.hpp"

namespace sqzmag {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

nlohmann::json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json metadata_json(const ApparatusMetadata& m) {
  nlohmann::json j;
  j["pump_power_mw"] = optional_json(m.pump_power_mw);
  j["probe_power_uw"] = optional_json(m.probe_power_uw);
  j["cell_length_inches"] = optional_json(m.cell_length_inches);
  j["temperature_celsius"] = optional_json(m.temperature_celsius);
  j["beam_angle_mrad"] = optional_json(m.beam_angle_mrad);
  j["probe_offset_mhz"] = optional_json(m.probe_offset_mhz);
  j["conjugate_offset_mhz"] = optional_json(m.conjugate_offset_mhz);
  j["dc_residual_ut_max"] = optional_json(m.dc_residual_ut_max);
  j["cell_transmission"] = optional_json(m.cell_transmission);
  return j;
}

nlohmann::json config_json(const ExperimentConfig& cfg, double rotation_gain) {
  nlohmann::json scenario;
  scenario["chain"] = {{"gain", cfg.chain.gain},
                       {"eta_probe", cfg.chain.eta_probe},
                       {"eta_conjugate", cfg.chain.eta_conjugate},
                       {"seed_photon_flux_per_second", cfg.chain.seed_photon_flux}};
  scenario["drive"] = {{"dc_field_tesla", cfg.drive.dc_field_tesla},
                       {"ac_amplitude_tesla", cfg.drive.ac_amplitude_tesla},
                       {"amplitude_convention", "zero-to-peak"},
                       {"ac_frequency_hz", cfg.drive.ac_frequency_hz},
                       {"phase_radians", cfg.drive.phase_radians}};
  scenario["rotation_gain_rad_per_tesla"] = rotation_gain;
  scenario["calibration_target_tesla_per_sqrt_hz"] =
      optional_json(cfg.calibration_target_t_per_sqrt_hz);
  scenario["pbs_sign_probe"] = cfg.pbs_sign_probe;
  scenario["pbs_sign_conjugate"] = cfg.pbs_sign_conjugate;
  scenario["classical_noise_rel_snl"] = cfg.classical_noise_rel_snl;
  scenario["sample_rate_hz"] = cfg.sample_rate_hz;
  scenario["duration_seconds"] = cfg.duration_seconds;
  scenario["rng_seed"] = cfg.rng_seed;
  scenario["noise_mode"] = noise_mode_name(cfg.noise_mode);
  scenario["frequency_scale"] = cfg.frequency_scale;

  nlohmann::json spectrum;
  spectrum["rbw_hz"] = cfg.spectrum.rbw_hz;
  spectrum["vbw_hz"] = cfg.spectrum.vbw_hz;
  spectrum["trace_averages"] = cfg.spectrum.trace_averages;
  spectrum["vbw_average_factor"] = cfg.spectrum.vbw_average_factor();
  spectrum["effective_averages"] =
      cfg.spectrum.trace_averages * cfg.spectrum.vbw_average_factor();
  spectrum["window"] = window_name(cfg.spectrum.window);
  spectrum["center_frequency_hz"] = cfg.spectrum.center_frequency_hz;
  spectrum["span_hz"] = cfg.spectrum.span_hz;

  nlohmann::json j;
  j["preset"] = cfg.preset_name.empty() ? nlohmann::json(nullptr)
                                        : nlohmann::json(cfg.preset_name);
  j["annotations"] = cfg.annotations;
  j["scenario"] = std::move(scenario);
  j["spectrum"] = std::move(spectrum);
  j["metadata"] = metadata_json(cfg.metadata);
  return j;
}

nlohmann::json tool_json() {
  return {{"name", "sqzmag"},
          {"version", kVersion},
          {"trace_generator", kTraceGeneratorVersion}};
}

nlohmann::json sensitivity_json(const SensitivityReport& report) {
  nlohmann::json j;
  j["snr_power_db"] = report.snr_power_db;
  j["noise_floor_db_rel_snl"] = report.squeezing_db;
  j["linewidth_fwhm_hz"] = optional_json(report.linewidth_fwhm_hz);
  j["sensitivity_tesla_per_sqrt_hz"] = report.sensitivity_t_per_sqrt_hz;
  j["applied_field_tesla"] = report.applied_field_tesla;
  return j;
}

}  // namespace

const char* channel_name(TraceChannel channel) {
  switch (channel) {
    case TraceChannel::kProbe: return "probe";
    case TraceChannel::kConjugate: return "conjugate";
    case TraceChannel::kDifference: return "difference";
  }
  return "?";
}

const char* window_name(Window window) {
  return window == Window::kHann ? "hann" : "rectangular";
}

const char* noise_mode_name(NoiseMode mode) {
  return mode == NoiseMode::kSqueezed ? "squeezed" : "shot_noise_limited";
}

void write_spectrum_csv(const std::string& path, const NoiseSpectrum& spectrum,
                        double frequency_scale) {
  std::ofstream out = open_out(path);
  out << "frequency_hz,psd_db_rel_snl\n";
  for (std::size_t i = 0; i < spectrum.frequencies_hz.size(); ++i)
    out << fmt(spectrum.frequencies_hz[i] * frequency_scale) << ','
        << fmt(spectrum.psd_db_rel_snl[i]) << '\n';
}

void write_traces_csv(const std::string& path, const PhotocurrentTraces& traces) {
  std::ofstream out = open_out(path);
  out << "index,probe,conjugate,difference\n";
  for (std::size_t i = 0; i < traces.probe.size(); ++i)
    out << i << ',' << fmt(traces.probe[i]) << ',' << fmt(traces.conjugate[i]) << ','
        << fmt(traces.difference[i]) << '\n';
}

void write_traces_binary(const std::string& path, const PhotocurrentTraces& traces) {
  std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
  const char magic[8] = {'S', 'Q', 'Z', 'T', 'R', 'C', '0', '1'};
  out.write(magic, sizeof(magic));
  std::uint64_t n = traces.probe.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&traces.sample_rate_hz), sizeof(double));
  std::uint64_t seed = traces.rng_seed;
  out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  auto dump = [&](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(traces.probe);
  dump(traces.conjugate);
  dump(traces.difference);
  if (!out) throw Error("short write to '" + path + "'");
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  std::ofstream out = open_out(path);
  out << "applied_field_tesla,snr_snl_db,snr_squeezed_db,"
         "sensitivity_snl_tesla_per_sqrt_hz,sensitivity_squeezed_tesla_per_sqrt_hz\n";
  for (const SweepPoint& p : sweep.points)
    out << fmt(p.applied_field_tesla) << ',' << fmt(p.snr_snl_db) << ','
        << fmt(p.snr_squeezed_db) << ',' << fmt(p.sensitivity_snl_t_per_sqrt_hz) << ','
        << fmt(p.sensitivity_squeezed_t_per_sqrt_hz) << '\n';
}

nlohmann::json scenario_report(const ScenarioRun& run) {
  nlohmann::json j;
  j["tool"] = tool_json();
  j["config"] = config_json(run.config, run.rotation_gain_rad_per_tesla);
  j["trace"] = {{"generator_version", run.traces.generator_version},
                {"samples", run.traces.probe.size()},
                {"simulated_sample_rate_hz", run.traces.sample_rate_hz},
                {"rng_seed", run.traces.rng_seed},
                {"mean_flux_probe_per_second", run.traces.mean_flux_probe},
                {"mean_flux_conjugate_per_second", run.traces.mean_flux_conjugate},
                {"snl_probe_density", run.traces.snl_probe_density},
                {"snl_conjugate_density", run.traces.snl_conjugate_density},
                {"snl_difference_density", run.traces.snl_difference_density}};
  j["model"] = {{"expected_difference_noise_rel_snl", run.expected_noise_rel_snl},
                {"expected_difference_noise_rel_snl_db",
                 10.0 * std::log10(run.expected_noise_rel_snl)}};

  nlohmann::json channels = nlohmann::json::array();
  for (const ChannelResult& ch : run.channels) {
    nlohmann::json c;
    c["channel"] = channel_name(ch.channel);
    c["floor_db_rel_snl"] = ch.floor_db_rel_snl;
    c["tone_snr_db"] = optional_json(ch.tone_snr_db);
    c["sensitivity"] =
        ch.sensitivity ? sensitivity_json(*ch.sensitivity) : nlohmann::json(nullptr);
    c["enbw_hz"] = ch.spectrum.enbw_hz;
    c["bin_width_hz"] = ch.spectrum.bin_width_hz;
    c["segments_averaged"] = ch.spectrum.segment_count;
    if (!ch.metrology_note.empty()) c["note"] = ch.metrology_note;
    channels.push_back(std::move(c));
  }
  j["channels"] = std::move(channels);
  return j;
}

nlohmann::json sweep_report(const SweepResult& sweep) {
  nlohmann::json j;
  j["tool"] = tool_json();
  j["config"] = config_json(sweep.config, sweep.rotation_gain_rad_per_tesla);
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& p : sweep.points) {
    nlohmann::json row;
    row["applied_field_tesla"] = p.applied_field_tesla;
    row["snr_snl_db"] = finite_or_null(p.snr_snl_db);
    row["snr_squeezed_db"] = finite_or_null(p.snr_squeezed_db);
    row["sensitivity_snl_tesla_per_sqrt_hz"] = finite_or_null(p.sensitivity_snl_t_per_sqrt_hz);
    row["sensitivity_squeezed_tesla_per_sqrt_hz"] =
        finite_or_null(p.sensitivity_squeezed_t_per_sqrt_hz);
    if (!p.note.empty()) row["note"] = p.note;
    points.push_back(std::move(row));
  }
  j["points"] = std::move(points);
  return j;
}

void write_json(const std::string& path, const nlohmann::json& document) {
  std::ofstream out = open_out(path);
  out << document.dump(2) << '\n';
}

}  // namespace sqzmag
