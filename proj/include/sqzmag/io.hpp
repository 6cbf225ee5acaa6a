#pragma once

#include <string>

#include "json.hpp"
#include "sqzmag/harness.hpp"

namespace sqzmag {

const char* channel_name(TraceChannel channel);
const char* window_name(Window window);
const char* noise_mode_name(NoiseMode mode);

/// Two columns, header exactly "frequency_hz,psd_db_rel_snl".  Frequencies
/// are mapped back to lab units (simulated frequency times frequency_scale);
/// each row is one RBW-wide measurement at its analysis frequency.
void write_spectrum_csv(const std::string& path, const NoiseSpectrum& spectrum,
                        double frequency_scale);

/// Columns "index,probe,conjugate,difference", one row per sample, trace
/// units (flux normalized by sqrt of total detected flux).
void write_traces_csv(const std::string& path, const PhotocurrentTraces& traces);

/// Little-endian dump: 8-byte magic "SQZTRC01", u64 sample count, f64 sample
/// rate, u64 seed, then probe, conjugate, difference arrays of f64.
void write_traces_binary(const std::string& path, const PhotocurrentTraces& traces);

/// Header "applied_field_tesla,snr_snl_db,snr_squeezed_db,
/// sensitivity_snl_tesla_per_sqrt_hz,sensitivity_squeezed_tesla_per_sqrt_hz".
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

/// Structured run record: tool versions, resolved scenario (including the
/// rotation gain and rng seed), spectrum settings, per-channel results.
nlohmann::json scenario_report(const ScenarioRun& run);
nlohmann::json sweep_report(const SweepResult& sweep);

void write_json(const std::string& path, const nlohmann::json& document);

}  // namespace sqzmag
