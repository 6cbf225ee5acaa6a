#include "sqzmag/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <fftw3.h>

#include "sqzmag/errors.hpp"

namespace sqzmag {

namespace {

constexpr double kMinDb = -300.0;

double window_enbw_bins(Window w) {
  switch (w) {
    case Window::kRectangular:
      return 1.0;
    case Window::kHann:
      return 1.5;
  }
  throw DomainError("unknown window");
}

// Half width of the region (in bins) that holds essentially all of a tone's
// power for the window, at any bin alignment.
std::size_t peak_half_width_bins(Window w) {
  return w == Window::kHann ? 2 : 1;
}

constexpr std::size_t kGuardBins = 3;

const std::vector<double>& select_channel(const PhotocurrentTraces& tr,
                                          TraceChannel ch) {
  switch (ch) {
    case TraceChannel::kProbe:
      return tr.probe;
    case TraceChannel::kConjugate:
      return tr.conjugate;
    case TraceChannel::kDifference:
      return tr.difference;
  }
  throw DomainError("unknown trace channel");
}

double channel_snl_density(const PhotocurrentTraces& tr, TraceChannel ch) {
  switch (ch) {
    case TraceChannel::kProbe:
      return tr.snl_probe_density;
    case TraceChannel::kConjugate:
      return tr.snl_conjugate_density;
    case TraceChannel::kDifference:
      return tr.snl_difference_density;
  }
  throw DomainError("unknown trace channel");
}

std::size_t nearest_bin(const NoiseSpectrum& s, double f0) {
  if (s.frequencies_hz.empty()) {
    throw DomainError("spectrum is empty");
  }
  if (f0 < s.frequencies_hz.front() - 0.5 * s.bin_width_hz ||
      f0 > s.frequencies_hz.back() + 0.5 * s.bin_width_hz) {
    throw DomainError("tone frequency outside the spectrum span");
  }
  const double rel = (f0 - s.frequencies_hz.front()) / s.bin_width_hz;
  const auto idx = static_cast<std::ptrdiff_t>(std::llround(rel));
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(idx, 0,
                                 static_cast<std::ptrdiff_t>(
                                     s.frequencies_hz.size() - 1)));
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

struct FftwPlan {
  double* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  explicit FftwPlan(std::size_t n) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  ~FftwPlan() {
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
};

} // namespace

void SpectrumConfig::validate() const {
  if (!std::isfinite(rbw_hz) || rbw_hz <= 0.0) {
    throw ConfigError("rbw_hz must be > 0");
  }
  if (!std::isfinite(vbw_hz) || vbw_hz <= 0.0) {
    throw ConfigError("vbw_hz must be > 0");
  }
  if (trace_averages < 1) {
    throw ConfigError("trace_averages must be >= 1");
  }
  if (!std::isfinite(center_frequency_hz) || center_frequency_hz <= 0.0) {
    throw ConfigError("center_frequency_hz must be > 0");
  }
  if (!std::isfinite(span_hz) || span_hz <= 0.0) {
    throw ConfigError("span_hz must be > 0");
  }
}

int SpectrumConfig::vbw_average_factor() const {
  return std::max(1, static_cast<int>(std::lround(rbw_hz / vbw_hz)));
}

std::size_t SpectrumConfig::segment_length(double sample_rate_hz) const {
  return static_cast<std::size_t>(std::llround(sample_rate_hz / rbw_hz));
}

NoiseSpectrum estimate_psd(const PhotocurrentTraces& traces,
                           const SpectrumConfig& config, TraceChannel channel) {
  config.validate();
  const std::vector<double>& y = select_channel(traces, channel);
  const double fs = traces.sample_rate_hz;
  if (fs <= 0.0 || y.empty()) {
    throw DomainError("traces are empty");
  }

  const std::size_t seg_len = config.segment_length(fs);
  if (seg_len < 16) {
    throw ConfigError("rbw_hz too large: segments would be shorter than 16 samples");
  }
  const std::size_t n_seg =
      static_cast<std::size_t>(config.trace_averages) *
      static_cast<std::size_t>(config.vbw_average_factor());
  if (n_seg * seg_len > y.size()) {
    std::ostringstream msg;
    msg << "trace too short for the requested averaging: need "
        << static_cast<double>(n_seg * seg_len) / fs << " s ("
        << n_seg << " segments of " << seg_len << " samples), have "
        << static_cast<double>(y.size()) / fs << " s";
    throw ConfigError(msg.str());
  }

  const double df = fs / static_cast<double>(seg_len);
  const double nyquist = 0.5 * fs;
  const double f_lo = config.center_frequency_hz - 0.5 * config.span_hz;
  const double f_hi = config.center_frequency_hz + 0.5 * config.span_hz;
  if (f_lo < 0.0 || f_hi > nyquist * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "span [" << f_lo << ", " << f_hi
        << "] Hz falls outside the measurable band [0, " << nyquist << "] Hz";
    throw ConfigError(msg.str());
  }

  std::vector<double> w(seg_len, 1.0);
  if (config.window == Window::kHann) {
    for (std::size_t k = 0; k < seg_len; ++k) {
      w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                  static_cast<double>(k) /
                                  static_cast<double>(seg_len));
    }
  }
  const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
  const double sum_w2 =
      std::inner_product(w.begin(), w.end(), w.begin(), 0.0);

  const double mean = std::accumulate(y.begin(), y.end(), 0.0) /
                      static_cast<double>(y.size());

  const std::size_t n_bins = seg_len / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  FftwPlan fft(seg_len);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const double* seg = y.data() + s * seg_len;
    for (std::size_t k = 0; k < seg_len; ++k) {
      fft.in[k] = (seg[k] - mean) * w[k];
    }
    fftw_execute(fft.plan);
    for (std::size_t j = 0; j < n_bins; ++j) {
      acc[j] += fft.out[j][0] * fft.out[j][0] + fft.out[j][1] * fft.out[j][1];
    }
  }

  const bool even = seg_len % 2 == 0;
  const double scale = 1.0 / (static_cast<double>(n_seg) * fs * sum_w2);
  NoiseSpectrum spec;
  spec.bin_width_hz = df;
  spec.enbw_hz = df * static_cast<double>(seg_len) * sum_w2 / (sum_w * sum_w);
  spec.snl_density = channel_snl_density(traces, channel);
  if (spec.snl_density <= 0.0) {
    throw DomainError("channel has no shot-noise reference");
  }
  spec.segment_count = n_seg;
  spec.window = config.window;
  spec.channel = channel;
  spec.config = config;

  const auto j_lo = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, std::llround(std::ceil(f_lo / df - 1e-9))));
  const auto j_hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      static_cast<std::ptrdiff_t>(n_bins - 1),
      std::llround(std::floor(f_hi / df + 1e-9))));
  if (j_hi < j_lo + 16) {
    throw ConfigError("span too narrow: fewer than 16 bins");
  }
  spec.frequencies_hz.reserve(j_hi - j_lo + 1);
  spec.densities.reserve(j_hi - j_lo + 1);
  spec.psd_db_rel_snl.reserve(j_hi - j_lo + 1);
  for (std::size_t j = j_lo; j <= j_hi; ++j) {
    const bool one_sided_pair = j != 0 && !(even && j == n_bins - 1);
    const double density = (one_sided_pair ? 2.0 : 1.0) * acc[j] * scale;
    spec.frequencies_hz.push_back(df * static_cast<double>(j));
    spec.densities.push_back(density);
    const double rel = density / spec.snl_density;
    spec.psd_db_rel_snl.push_back(
        rel > 0.0 ? std::max(kMinDb, 10.0 * std::log10(rel)) : kMinDb);
  }
  return spec;
}

double floor_density(const NoiseSpectrum& spectrum,
                     std::optional<double> tone_frequency_hz) {
  const std::size_t n = spectrum.densities.size();
  std::vector<double> flank;
  flank.reserve(n);
  if (tone_frequency_hz) {
    const std::size_t j0 = nearest_bin(spectrum, *tone_frequency_hz);
    const std::size_t excl =
        peak_half_width_bins(spectrum.window) + kGuardBins;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t dist = j > j0 ? j - j0 : j0 - j;
      if (dist > excl) {
        flank.push_back(spectrum.densities[j]);
      }
    }
  } else {
    flank = spectrum.densities;
  }
  if (flank.size() < 8) {
    throw ConfigError("span too narrow around the tone for a floor estimate");
  }
  return median(std::move(flank));
}

double floor_db_rel_snl(const NoiseSpectrum& spectrum,
                        std::optional<double> tone_frequency_hz) {
  const double d = floor_density(spectrum, tone_frequency_hz);
  const double rel = d / spectrum.snl_density;
  return rel > 0.0 ? 10.0 * std::log10(rel) : kMinDb;
}

double tone_power(const NoiseSpectrum& spectrum, double tone_frequency_hz) {
  const std::size_t j0 = nearest_bin(spectrum, tone_frequency_hz);
  const std::size_t half = peak_half_width_bins(spectrum.window);
  const double floor = floor_density(spectrum, tone_frequency_hz);
  const std::size_t lo = j0 >= half ? j0 - half : 0;
  const std::size_t hi =
      std::min(spectrum.densities.size() - 1, j0 + half);
  double power = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) {
    power += (spectrum.densities[j] - floor) * spectrum.bin_width_hz;
  }
  return power;
}

double tone_snr(const NoiseSpectrum& spectrum, double tone_frequency_hz) {
  const double floor = floor_density(spectrum, tone_frequency_hz);
  const double power = tone_power(spectrum, tone_frequency_hz);
  const double ref = floor * spectrum.bin_width_hz;
  if (!(ref > 0.0)) {
    throw MetrologyError("noise floor estimate is zero; SNR undefined");
  }
  const double ratio = power / ref;
  return ratio > 0.0 ? std::max(kMinDb, 10.0 * std::log10(ratio)) : kMinDb;
}

double fwhm_linewidth(const NoiseSpectrum& spectrum,
                      double tone_frequency_hz) {
  const double snr = tone_snr(spectrum, tone_frequency_hz);
  if (snr < kLinewidthMinSnrDb) {
    throw MetrologyError("tone SNR below 6 dB; linewidth not measurable");
  }
  const std::size_t j0 = nearest_bin(spectrum, tone_frequency_hz);
  const std::size_t half = peak_half_width_bins(spectrum.window);
  const std::size_t lo = j0 >= half ? j0 - half : 0;
  const std::size_t hi = std::min(spectrum.densities.size() - 1, j0 + half);
  std::size_t jp = lo;
  for (std::size_t j = lo; j <= hi; ++j) {
    if (spectrum.densities[j] > spectrum.densities[jp]) {
      jp = j;
    }
  }
  const double level = 0.5 * spectrum.densities[jp];

  // Walk outward to the first bin below half maximum and interpolate the
  // crossing linearly.
  double left = spectrum.frequencies_hz.front();
  bool found_left = false;
  for (std::size_t j = jp; j-- > 0;) {
    if (spectrum.densities[j] < level) {
      const double d0 = spectrum.densities[j];
      const double d1 = spectrum.densities[j + 1];
      const double t = (level - d0) / (d1 - d0);
      left = spectrum.frequencies_hz[j] + t * spectrum.bin_width_hz;
      found_left = true;
      break;
    }
  }
  double right = spectrum.frequencies_hz.back();
  bool found_right = false;
  for (std::size_t j = jp + 1; j < spectrum.densities.size(); ++j) {
    if (spectrum.densities[j] < level) {
      const double d0 = spectrum.densities[j - 1];
      const double d1 = spectrum.densities[j];
      const double t = (d0 - level) / (d0 - d1);
      right = spectrum.frequencies_hz[j - 1] + t * spectrum.bin_width_hz;
      found_right = true;
      break;
    }
  }
  if (!found_left || !found_right) {
    throw MetrologyError("tone peak wider than the spectrum span");
  }
  return right - left;
}

SensitivityReport extract_sensitivity(const NoiseSpectrum& spectrum,
                                      const FieldDrive& drive) {
  drive.validate();
  if (drive.ac_amplitude_tesla <= 0.0) {
    throw DomainError("sensitivity extraction requires an ac drive");
  }
  SensitivityReport report;
  report.applied_field_tesla = drive.ac_amplitude_tesla;
  report.snr_power_db = tone_snr(spectrum, drive.ac_frequency_hz);
  report.squeezing_db = floor_db_rel_snl(spectrum, drive.ac_frequency_hz);
  if (report.snr_power_db < kSensitivityMinSnrDb) {
    throw MetrologyError("tone below the detection threshold; sensitivity not measurable");
  }
  const double amplitude_snr = std::pow(10.0, report.snr_power_db / 20.0);
  report.sensitivity_t_per_sqrt_hz =
      drive.ac_amplitude_tesla /
      (amplitude_snr * std::sqrt(spectrum.bin_width_hz));
  if (report.snr_power_db >= kLinewidthMinSnrDb) {
    report.linewidth_fwhm_hz =
        fwhm_linewidth(spectrum, drive.ac_frequency_hz);
  }
  return report;
}

} // namespace sqzmag
