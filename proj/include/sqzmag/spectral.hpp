#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sqzmag/signal_model.hpp"

namespace sqzmag {

enum class Window { kRectangular, kHann };

enum class TraceChannel { kProbe, kConjugate, kDifference };

/// Spectrum-analyzer style settings.  RBW fixes the segment length
/// (bin width = RBW); VBW below RBW adds averaging by the factor
/// round(RBW / VBW); the span selects the reported bins.
struct SpectrumConfig {
  double rbw_hz = 0.0;
  double vbw_hz = 0.0;
  int trace_averages = 1;
  Window window = Window::kHann;
  double center_frequency_hz = 0.0;
  double span_hz = 0.0;

  void validate() const;
  int vbw_average_factor() const;
  std::size_t segment_length(double sample_rate_hz) const;
};

/// Averaged one-sided power spectral density of one trace channel,
/// normalized to that channel's shot-noise density (0 dB = SNL).
struct NoiseSpectrum {
  std::vector<double> frequencies_hz;
  std::vector<double> psd_db_rel_snl;
  std::vector<double> densities; ///< absolute, trace units^2 / Hz

  double bin_width_hz = 0.0;
  double enbw_hz = 0.0;
  double snl_density = 0.0;
  std::size_t segment_count = 0;
  Window window = Window::kHann;
  TraceChannel channel = TraceChannel::kDifference;
  SpectrumConfig config;
};

NoiseSpectrum estimate_psd(const PhotocurrentTraces& traces,
                           const SpectrumConfig& config,
                           TraceChannel channel = TraceChannel::kDifference);

/// Median-of-flanking-bins noise floor density (trace units^2 / Hz).  When
/// a tone frequency is given, the peak bins and a 3-bin guard on each side
/// are excluded.
double floor_density(const NoiseSpectrum& spectrum,
                     std::optional<double> tone_frequency_hz = std::nullopt);

/// Floor level in dB relative to the channel's shot-noise density.
double floor_db_rel_snl(const NoiseSpectrum& spectrum,
                        std::optional<double> tone_frequency_hz = std::nullopt);

/// Tone power above the floor, integrated over the peak bins (may come out
/// negative for pure noise), in trace units^2.
double tone_power(const NoiseSpectrum& spectrum, double tone_frequency_hz);

/// Power SNR of the tone against the floor power in one RBW bin, in dB.
/// Clamped below at -300 dB.
double tone_snr(const NoiseSpectrum& spectrum, double tone_frequency_hz);

/// Full width at half maximum of the tone peak by linear interpolation
/// between bins.  Requires tone SNR >= 6 dB.
double fwhm_linewidth(const NoiseSpectrum& spectrum, double tone_frequency_hz);

struct SensitivityReport {
  double snr_power_db = 0.0;
  double squeezing_db = 0.0; ///< floor relative to SNL
  std::optional<double> linewidth_fwhm_hz;
  double sensitivity_t_per_sqrt_hz = 0.0;
  double applied_field_tesla = 0.0;
};

/// Tone SNR below this is treated as not measurable for sensitivity.
inline constexpr double kSensitivityMinSnrDb = 3.0;
/// Tone SNR below this is treated as not measurable for linewidth.
inline constexpr double kLinewidthMinSnrDb = 6.0;

/// Field sensitivity from a spectrum and the drive that produced it:
/// sensitivity = ac_amplitude / (10^(SNR_dB/20) * sqrt(bin width)).
/// Throws MetrologyError when the tone is below the detection threshold.
SensitivityReport extract_sensitivity(const NoiseSpectrum& spectrum,
                                      const FieldDrive& drive);

} // namespace sqzmag
