#include "sqzmag/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "sqzmag/errors.hpp"
#include "sqzmag/rng.hpp"
#include "sqzmag/version.hpp"

namespace sqzmag {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMaxRotation = std::numbers::pi / 4.0;

// Materialized traces are capped; beyond this the scenario should be run
// at a reduced frequency scale instead (see docs/MODEL.md).
constexpr std::size_t kMaxSamples = std::size_t{1} << 26;

struct NoiseCholesky {
  double l00 = 0.0;
  double l10 = 0.0;
  double l11 = 0.0;
};

// Lower-triangular factor of the per-sample 2x2 noise covariance.
NoiseCholesky cholesky2(double var_p, double var_c, double cov) {
  NoiseCholesky l;
  if (var_p > 0.0) {
    l.l00 = std::sqrt(var_p);
    l.l10 = cov / l.l00;
    l.l11 = std::sqrt(std::max(0.0, var_c - l.l10 * l.l10));
  } else {
    l.l00 = 0.0;
    l.l10 = 0.0;
    l.l11 = std::sqrt(std::max(0.0, var_c));
  }
  return l;
}

unsigned resolve_workers(unsigned requested, std::size_t n) {
  unsigned w = requested;
  if (w == 0) {
    w = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  }
  const std::size_t max_useful = std::max<std::size_t>(1, n / 4096);
  return static_cast<unsigned>(
      std::min<std::size_t>(w, std::max<std::size_t>(1, max_useful)));
}

} // namespace

void FieldDrive::validate() const {
  for (double v : {dc_field_tesla, ac_amplitude_tesla, ac_frequency_hz,
                   phase_radians}) {
    if (!std::isfinite(v)) {
      throw DomainError("drive parameters must be finite");
    }
  }
  if (ac_amplitude_tesla < 0.0) {
    throw DomainError("ac_amplitude_tesla must be >= 0 (zero-to-peak)");
  }
  if (ac_frequency_hz < 0.0) {
    throw DomainError("ac_frequency_hz must be >= 0");
  }
  if (ac_amplitude_tesla > 0.0 && ac_frequency_hz <= 0.0) {
    throw DomainError("ac drive requires ac_frequency_hz > 0");
  }
}

void MagnetometerScenario::validate() const {
  chain.validate();
  drive.validate();
  if (!std::isfinite(rotation_gain_rad_per_tesla) ||
      rotation_gain_rad_per_tesla <= 0.0) {
    throw DomainError("rotation_gain_rad_per_tesla must be > 0");
  }
  if (std::abs(pbs_sign_probe) != 1 || std::abs(pbs_sign_conjugate) != 1) {
    throw DomainError("pbs signs must be +1 or -1");
  }
  if (!std::isfinite(classical_noise_rel_snl) || classical_noise_rel_snl < 0.0) {
    throw DomainError("classical_noise_rel_snl must be >= 0");
  }
  if (!std::isfinite(sample_rate_hz) || sample_rate_hz <= 0.0) {
    throw DomainError("sample_rate_hz must be > 0");
  }
  if (drive.ac_frequency_hz > 0.0 &&
      sample_rate_hz < 4.0 * drive.ac_frequency_hz) {
    throw DomainError(
        "sample_rate_hz must be at least 4x ac_frequency_hz (2x Nyquist margin)");
  }
  if (!std::isfinite(duration_seconds) || duration_seconds <= 0.0) {
    throw DomainError("duration_seconds must be > 0");
  }
  const double n = duration_seconds * sample_rate_hz;
  const double rounded = std::round(n);
  if (rounded < 2.0 || std::abs(n - rounded) > 1e-6 * std::max(1.0, rounded)) {
    throw DomainError(
        "duration_seconds * sample_rate_hz must be an integer >= 2");
  }
}

std::size_t MagnetometerScenario::sample_count() const {
  return static_cast<std::size_t>(
      std::llround(duration_seconds * sample_rate_hz));
}

std::vector<double> rotation_angle_series(const FieldDrive& drive,
                                          double rotation_gain_rad_per_tesla,
                                          std::span<const double> times_s) {
  drive.validate();
  if (!std::isfinite(rotation_gain_rad_per_tesla) ||
      rotation_gain_rad_per_tesla <= 0.0) {
    throw DomainError("rotation_gain_rad_per_tesla must be > 0");
  }
  std::vector<double> theta(times_s.size());
  const double kdc = rotation_gain_rad_per_tesla * drive.dc_field_tesla;
  const double kac = rotation_gain_rad_per_tesla * drive.ac_amplitude_tesla;
  for (std::size_t i = 0; i < times_s.size(); ++i) {
    theta[i] = kdc + kac * std::sin(kTwoPi * drive.ac_frequency_hz * times_s[i] +
                                    drive.phase_radians);
    if (std::abs(theta[i]) >= kMaxRotation) {
      throw InfeasibilityError(
          "rotation angle reaches pi/4; outside the linear analyzer range");
    }
  }
  return theta;
}

std::vector<double> pbs_intensity(std::span<const double> theta,
                                  double mean_flux, int pbs_sign) {
  if (!std::isfinite(mean_flux) || mean_flux < 0.0) {
    throw DomainError("mean_flux must be >= 0");
  }
  if (std::abs(pbs_sign) != 1) {
    throw DomainError("pbs_sign must be +1 or -1");
  }
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = mean_flux * (0.5 + pbs_sign * theta[i]);
  }
  return out;
}

double calibrate_rotation_gain(double target_sensitivity_t_per_sqrt_hz,
                               const MagnetometerScenario& scenario) {
  if (!std::isfinite(target_sensitivity_t_per_sqrt_hz) ||
      target_sensitivity_t_per_sqrt_hz <= 0.0) {
    throw DomainError("target sensitivity must be > 0");
  }
  scenario.chain.validate();
  scenario.drive.validate();
  const TwoModeGaussianState state = fwm_output_state(scenario.chain);
  const double total_flux =
      state.mean_flux_probe() + state.mean_flux_conjugate();
  if (total_flux <= 0.0) {
    throw DomainError("chain produces zero detected flux");
  }
  // A tone of amplitude B appears in the normalized difference record with
  // amplitude sqrt(N_tot) kappa B, so its power against the unit shot-noise
  // density in bandwidth bw is N_tot kappa^2 B^2 / (2 bw).  Setting this to
  // one at B = target and bw = 1 Hz:
  const double kappa = std::sqrt(2.0 / total_flux) /
                       target_sensitivity_t_per_sqrt_hz;
  const double theta_max =
      kappa * (std::abs(scenario.drive.dc_field_tesla) +
               scenario.drive.ac_amplitude_tesla);
  if (theta_max >= 0.1) {
    throw InfeasibilityError(
        "calibration target unreachable: drive would leave the small-angle regime");
  }
  return kappa;
}

PhotocurrentTraces synthesize_traces(const MagnetometerScenario& scenario,
                                     unsigned n_workers) {
  scenario.validate();
  const std::size_t n = scenario.sample_count();
  if (n > kMaxSamples) {
    throw InfeasibilityError(
        "trace of " + std::to_string(n) +
        " samples exceeds the materialization cap (" +
        std::to_string(kMaxSamples) +
        "); reduce duration or run at a larger frequency_scale");
  }

  const TwoModeGaussianState state = fwm_output_state(scenario.chain);
  const double flux_p = state.mean_flux_probe();
  const double flux_c = state.mean_flux_conjugate();
  const double total_flux = flux_p + flux_c;
  if (total_flux <= 0.0) {
    throw DomainError("chain produces zero detected flux");
  }

  const double kappa = scenario.rotation_gain_rad_per_tesla;
  const double theta_bound =
      kappa * (std::abs(scenario.drive.dc_field_tesla) +
               scenario.drive.ac_amplitude_tesla);
  if (theta_bound >= kMaxRotation) {
    throw InfeasibilityError(
        "rotation angle reaches pi/4; outside the linear analyzer range");
  }

  const NumberStatistics noise =
      scenario.noise_mode == NoiseMode::kSqueezed
          ? photon_number_covariance(state)
          : coherent_number_statistics(state);

  // Per-sample variances: white density (flux^2/Hz) times the sample
  // bandwidth fs/2, all normalized by the total flux.
  const double half_fs = 0.5 * scenario.sample_rate_hz;
  const NoiseCholesky l = cholesky2(noise.var_probe / total_flux * half_fs,
                                    noise.var_conjugate / total_flux * half_fs,
                                    noise.covariance / total_flux * half_fs);
  const double classical_sigma =
      std::sqrt(scenario.classical_noise_rel_snl * half_fs);
  const bool with_classical = scenario.classical_noise_rel_snl > 0.0;

  const double norm = 1.0 / std::sqrt(total_flux);
  const double dc_p = flux_p * 0.5 * norm;
  const double dc_c = flux_c * 0.5 * norm;
  const double sig_p = flux_p * scenario.pbs_sign_probe * norm;
  const double sig_c = flux_c * scenario.pbs_sign_conjugate * norm;

  const double kdc = kappa * scenario.drive.dc_field_tesla;
  const double kac = kappa * scenario.drive.ac_amplitude_tesla;
  const double cycles_per_sample =
      scenario.drive.ac_frequency_hz / scenario.sample_rate_hz;
  const double phase = scenario.drive.phase_radians;
  const std::uint64_t seed = scenario.rng_seed;

  PhotocurrentTraces tr;
  tr.probe.resize(n);
  tr.conjugate.resize(n);
  tr.difference.resize(n);
  tr.sample_rate_hz = scenario.sample_rate_hz;
  tr.rng_seed = seed;
  tr.generator_version = kTraceGeneratorVersion;
  tr.snl_probe_density = flux_p / total_flux;
  tr.snl_conjugate_density = flux_c / total_flux;
  tr.snl_difference_density = 1.0;
  tr.mean_flux_probe = flux_p;
  tr.mean_flux_conjugate = flux_c;

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const double cycles =
          std::fmod(static_cast<double>(k) * cycles_per_sample, 1.0);
      const double theta = kdc + kac * std::sin(kTwoPi * cycles + phase);
      const auto zq = rng::gauss_pair(seed, k, rng::kStreamQuantum);
      double common = 0.0;
      if (with_classical) {
        common = classical_sigma *
                 rng::gauss_pair(seed, k, rng::kStreamClassical).z0;
      }
      const double p = dc_p + sig_p * theta + l.l00 * zq.z0 + common;
      const double c = dc_c + sig_c * theta + l.l10 * zq.z0 + l.l11 * zq.z1 +
                       common;
      tr.probe[k] = p;
      tr.conjugate[k] = c;
      tr.difference[k] = p - c;
    }
  };

  const unsigned workers = resolve_workers(n_workers, n);
  if (workers <= 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min<std::size_t>(n, w * chunk);
      const std::size_t end = std::min<std::size_t>(n, begin + chunk);
      if (begin < end) {
        pool.emplace_back(fill, begin, end);
      }
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  return tr;
}

} // namespace sqzmag
