// Python module: thin wrappers over the simulator's main operations.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqzmag/config.hpp"
#include "sqzmag/errors.hpp"
#include "sqzmag/gaussian.hpp"
#include "sqzmag/harness.hpp"
#include "sqzmag/io.hpp"
#include "sqzmag/physics.hpp"
#include "sqzmag/presets.hpp"
#include "sqzmag/rng.hpp"
#include "sqzmag/signal_model.hpp"
#include "sqzmag/spectral.hpp"
#include "sqzmag/squeezing.hpp"
#include "sqzmag/version.hpp"

namespace py = pybind11;
using namespace sqzmag;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

}  // namespace

PYBIND11_MODULE(_sqzmag, m) {
  m.doc() = "Squeezed-light magnetometer simulator";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<InfeasibilityError>(m, "InfeasibilityError");
  py::register_exception<MetrologyError>(m, "MetrologyError");
  py::register_exception<DomainError>(m, "DomainError");

  // physics
  m.def(
      "larmor_frequency",
      [](double lande_g, double field_tesla) {
        return larmor_frequency({lande_g, field_tesla});
      },
      py::arg("lande_g"), py::arg("field_tesla"),
      "Larmor angular frequency (rad/s) for a Lande factor and field.");
  m.def(
      "field_for_larmor",
      [](double omega_rad_s, double lande_g) { return field_for_larmor(omega_rad_s, lande_g); },
      py::arg("omega_rad_s"), py::arg("lande_g"));
  m.def(
      "generalized_rabi",
      [](double resonant_rabi_rad_s, double detuning_rad_s) {
        return generalized_rabi({resonant_rabi_rad_s, detuning_rad_s, {}, {}});
      },
      py::arg("resonant_rabi_rad_s"), py::arg("detuning_rad_s"));
  m.def(
      "rabi_from_dipole",
      [](double dipole_moment_c_m, double field_amplitude_v_m) {
        return rabi_from_dipole(dipole_moment_c_m, field_amplitude_v_m);
      },
      py::arg("dipole_moment_c_m"), py::arg("field_amplitude_v_m"));
  m.def("rb_vapor_pressure_pa", &rb_vapor_pressure_pa, py::arg("temperature_kelvin"));
  m.def(
      "rb_vapor_density_cm3",
      [](double temperature_kelvin) { return rb_vapor_density_cm3(temperature_kelvin); },
      py::arg("temperature_kelvin"));

  // squeezed source
  py::class_<FwmChain>(m, "FwmChain")
      .def(py::init([](double gain, double eta_probe, double eta_conjugate,
                       double seed_photon_flux) {
             FwmChain c{gain, eta_probe, eta_conjugate, seed_photon_flux};
             c.validate();
             return c;
           }),
           py::arg("gain"), py::arg("eta_probe") = 1.0, py::arg("eta_conjugate") = 1.0,
           py::arg("seed_photon_flux") = 1.0)
      .def_readwrite("gain", &FwmChain::gain)
      .def_readwrite("eta_probe", &FwmChain::eta_probe)
      .def_readwrite("eta_conjugate", &FwmChain::eta_conjugate)
      .def_readwrite("seed_photon_flux", &FwmChain::seed_photon_flux);

  py::class_<TwoModeGaussianState>(m, "TwoModeGaussianState")
      .def_static("vacuum", &TwoModeGaussianState::vacuum)
      .def_readonly("mean", &TwoModeGaussianState::mean)
      .def_readonly("covariance", &TwoModeGaussianState::covariance)
      .def_property_readonly("mean_flux_probe", &TwoModeGaussianState::mean_flux_probe)
      .def_property_readonly("mean_flux_conjugate", &TwoModeGaussianState::mean_flux_conjugate)
      .def("physicality_eigenvalue", &TwoModeGaussianState::physicality_eigenvalue)
      .def("is_physical", &TwoModeGaussianState::is_physical, py::arg("tol") = 1e-9);

  m.def("two_mode_squeeze_symplectic", &two_mode_squeeze_symplectic, py::arg("gain"));
  m.def("fwm_output_state", &fwm_output_state, py::arg("chain"));

  py::class_<NumberStatistics>(m, "NumberStatistics")
      .def_readonly("mean_probe", &NumberStatistics::mean_probe)
      .def_readonly("mean_conjugate", &NumberStatistics::mean_conjugate)
      .def_readonly("var_probe", &NumberStatistics::var_probe)
      .def_readonly("var_conjugate", &NumberStatistics::var_conjugate)
      .def_readonly("covariance", &NumberStatistics::covariance)
      .def_readonly("probe_dark", &NumberStatistics::probe_dark)
      .def_readonly("conjugate_dark", &NumberStatistics::conjugate_dark)
      .def("difference_variance", &NumberStatistics::difference_variance)
      .def("total_flux", &NumberStatistics::total_flux);

  m.def("photon_number_covariance", &photon_number_covariance, py::arg("state"));
  m.def("coherent_number_statistics", &coherent_number_statistics, py::arg("state"));
  m.def("intensity_difference_noise_ratio", &intensity_difference_noise_ratio, py::arg("state"));
  m.def("npr_equal_arms", &npr_equal_arms, py::arg("gain"), py::arg("eta"));
  m.def("npr_to_db", &npr_to_db, py::arg("npr"));
  m.def("db_to_npr", &db_to_npr, py::arg("db"));
  m.def("infer_efficiency", &infer_efficiency, py::arg("squeezing_db"), py::arg("gain"));

  // signal model
  py::class_<FieldDrive>(m, "FieldDrive")
      .def(py::init([](double dc, double ac, double freq, double phase) {
             FieldDrive d{dc, ac, freq, phase};
             d.validate();
             return d;
           }),
           py::arg("dc_field_tesla") = 0.0, py::arg("ac_amplitude_tesla") = 0.0,
           py::arg("ac_frequency_hz") = 0.0, py::arg("phase_radians") = 0.0)
      .def_readwrite("dc_field_tesla", &FieldDrive::dc_field_tesla)
      .def_readwrite("ac_amplitude_tesla", &FieldDrive::ac_amplitude_tesla)
      .def_readwrite("ac_frequency_hz", &FieldDrive::ac_frequency_hz)
      .def_readwrite("phase_radians", &FieldDrive::phase_radians);

  py::enum_<NoiseMode>(m, "NoiseMode")
      .value("SQUEEZED", NoiseMode::kSqueezed)
      .value("SHOT_NOISE_LIMITED", NoiseMode::kShotNoiseLimited);

  py::class_<MagnetometerScenario>(m, "MagnetometerScenario")
      .def(py::init<>())
      .def_readwrite("chain", &MagnetometerScenario::chain)
      .def_readwrite("drive", &MagnetometerScenario::drive)
      .def_readwrite("rotation_gain_rad_per_tesla",
                     &MagnetometerScenario::rotation_gain_rad_per_tesla)
      .def_readwrite("pbs_sign_probe", &MagnetometerScenario::pbs_sign_probe)
      .def_readwrite("pbs_sign_conjugate", &MagnetometerScenario::pbs_sign_conjugate)
      .def_readwrite("classical_noise_rel_snl", &MagnetometerScenario::classical_noise_rel_snl)
      .def_readwrite("sample_rate_hz", &MagnetometerScenario::sample_rate_hz)
      .def_readwrite("duration_seconds", &MagnetometerScenario::duration_seconds)
      .def_readwrite("rng_seed", &MagnetometerScenario::rng_seed)
      .def_readwrite("noise_mode", &MagnetometerScenario::noise_mode)
      .def("validate", &MagnetometerScenario::validate);

  py::class_<PhotocurrentTraces>(m, "PhotocurrentTraces")
      .def_property_readonly("probe",
                             [](const PhotocurrentTraces& t) { return as_array(t.probe); })
      .def_property_readonly("conjugate",
                             [](const PhotocurrentTraces& t) { return as_array(t.conjugate); })
      .def_property_readonly("difference",
                             [](const PhotocurrentTraces& t) { return as_array(t.difference); })
      .def_readonly("sample_rate_hz", &PhotocurrentTraces::sample_rate_hz)
      .def_readonly("rng_seed", &PhotocurrentTraces::rng_seed)
      .def_readonly("generator_version", &PhotocurrentTraces::generator_version)
      .def_readonly("snl_probe_density", &PhotocurrentTraces::snl_probe_density)
      .def_readonly("snl_conjugate_density", &PhotocurrentTraces::snl_conjugate_density)
      .def_readonly("snl_difference_density", &PhotocurrentTraces::snl_difference_density)
      .def_readonly("mean_flux_probe", &PhotocurrentTraces::mean_flux_probe)
      .def_readonly("mean_flux_conjugate", &PhotocurrentTraces::mean_flux_conjugate);

  m.def("calibrate_rotation_gain", &calibrate_rotation_gain,
        py::arg("target_sensitivity_t_per_sqrt_hz"), py::arg("scenario"));
  m.def("synthesize_traces", &synthesize_traces, py::arg("scenario"), py::arg("n_workers") = 0,
        py::call_guard<py::gil_scoped_release>());

  // spectra
  py::enum_<Window>(m, "Window")
      .value("RECTANGULAR", Window::kRectangular)
      .value("HANN", Window::kHann);

  py::enum_<TraceChannel>(m, "TraceChannel")
      .value("PROBE", TraceChannel::kProbe)
      .value("CONJUGATE", TraceChannel::kConjugate)
      .value("DIFFERENCE", TraceChannel::kDifference);

  py::class_<SpectrumConfig>(m, "SpectrumConfig")
      .def(py::init<>())
      .def_readwrite("rbw_hz", &SpectrumConfig::rbw_hz)
      .def_readwrite("vbw_hz", &SpectrumConfig::vbw_hz)
      .def_readwrite("trace_averages", &SpectrumConfig::trace_averages)
      .def_readwrite("window", &SpectrumConfig::window)
      .def_readwrite("center_frequency_hz", &SpectrumConfig::center_frequency_hz)
      .def_readwrite("span_hz", &SpectrumConfig::span_hz)
      .def("vbw_average_factor", &SpectrumConfig::vbw_average_factor)
      .def("segment_length", &SpectrumConfig::segment_length, py::arg("sample_rate_hz"));

  py::class_<NoiseSpectrum>(m, "NoiseSpectrum")
      .def_property_readonly(
          "frequencies_hz", [](const NoiseSpectrum& s) { return as_array(s.frequencies_hz); })
      .def_property_readonly(
          "psd_db_rel_snl", [](const NoiseSpectrum& s) { return as_array(s.psd_db_rel_snl); })
      .def_property_readonly("densities",
                             [](const NoiseSpectrum& s) { return as_array(s.densities); })
      .def_readonly("bin_width_hz", &NoiseSpectrum::bin_width_hz)
      .def_readonly("enbw_hz", &NoiseSpectrum::enbw_hz)
      .def_readonly("snl_density", &NoiseSpectrum::snl_density)
      .def_readonly("segment_count", &NoiseSpectrum::segment_count)
      .def_readonly("channel", &NoiseSpectrum::channel);

  m.def("estimate_psd", &estimate_psd, py::arg("traces"), py::arg("config"),
        py::arg("channel") = TraceChannel::kDifference,
        py::call_guard<py::gil_scoped_release>());
  m.def("floor_density", &floor_density, py::arg("spectrum"),
        py::arg("tone_frequency_hz") = py::none());
  m.def("floor_db_rel_snl", &floor_db_rel_snl, py::arg("spectrum"),
        py::arg("tone_frequency_hz") = py::none());
  m.def("tone_power", &tone_power, py::arg("spectrum"), py::arg("tone_frequency_hz"));
  m.def("tone_snr", &tone_snr, py::arg("spectrum"), py::arg("tone_frequency_hz"));
  m.def("fwhm_linewidth", &fwhm_linewidth, py::arg("spectrum"), py::arg("tone_frequency_hz"));

  py::class_<SensitivityReport>(m, "SensitivityReport")
      .def_readonly("snr_power_db", &SensitivityReport::snr_power_db)
      .def_readonly("squeezing_db", &SensitivityReport::squeezing_db)
      .def_readonly("linewidth_fwhm_hz", &SensitivityReport::linewidth_fwhm_hz)
      .def_readonly("sensitivity_t_per_sqrt_hz", &SensitivityReport::sensitivity_t_per_sqrt_hz)
      .def_readonly("applied_field_tesla", &SensitivityReport::applied_field_tesla);

  m.def("extract_sensitivity", &extract_sensitivity, py::arg("spectrum"), py::arg("drive"));

  // harness
  py::class_<ApparatusMetadata>(m, "ApparatusMetadata")
      .def_readonly("pump_power_mw", &ApparatusMetadata::pump_power_mw)
      .def_readonly("probe_power_uw", &ApparatusMetadata::probe_power_uw)
      .def_readonly("temperature_celsius", &ApparatusMetadata::temperature_celsius)
      .def_readonly("cell_transmission", &ApparatusMetadata::cell_transmission);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readonly("preset_name", &ExperimentConfig::preset_name)
      .def_readwrite("chain", &ExperimentConfig::chain)
      .def_readwrite("drive", &ExperimentConfig::drive)
      .def_readwrite("classical_noise_rel_snl", &ExperimentConfig::classical_noise_rel_snl)
      .def_readwrite("sample_rate_hz", &ExperimentConfig::sample_rate_hz)
      .def_readwrite("duration_seconds", &ExperimentConfig::duration_seconds)
      .def_readwrite("rng_seed", &ExperimentConfig::rng_seed)
      .def_readwrite("noise_mode", &ExperimentConfig::noise_mode)
      .def_readwrite("frequency_scale", &ExperimentConfig::frequency_scale)
      .def_readwrite("spectrum", &ExperimentConfig::spectrum)
      .def_readwrite("channels", &ExperimentConfig::channels)
      .def_readonly("metadata", &ExperimentConfig::metadata)
      .def_readonly("annotations", &ExperimentConfig::annotations)
      .def("validate", &ExperimentConfig::validate)
      .def("resolve_rotation_gain", &ExperimentConfig::resolve_rotation_gain)
      .def("scenario", &ExperimentConfig::scenario, py::arg("rotation_gain"))
      .def("simulated_spectrum", &ExperimentConfig::simulated_spectrum);

  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        py::arg("source_name") = "<string>");
  m.def("parse_config_file", &parse_config_file, py::arg("path"));
  m.def("preset_names", &preset_names);
  m.def("preset_text", [](const std::string& name) { return std::string(preset_text(name)); },
        py::arg("name"));

  py::class_<ChannelResult>(m, "ChannelResult")
      .def_readonly("channel", &ChannelResult::channel)
      .def_readonly("spectrum", &ChannelResult::spectrum)
      .def_readonly("floor_db_rel_snl", &ChannelResult::floor_db_rel_snl)
      .def_readonly("tone_snr_db", &ChannelResult::tone_snr_db)
      .def_readonly("sensitivity", &ChannelResult::sensitivity)
      .def_readonly("metrology_note", &ChannelResult::metrology_note);

  py::class_<ScenarioRun>(m, "ScenarioRun")
      .def_readonly("rotation_gain_rad_per_tesla", &ScenarioRun::rotation_gain_rad_per_tesla)
      .def_readonly("expected_noise_rel_snl", &ScenarioRun::expected_noise_rel_snl)
      .def_readonly("traces", &ScenarioRun::traces)
      .def_readonly("channels", &ScenarioRun::channels)
      .def_property_readonly("report_json", [](const ScenarioRun& run) {
        return scenario_report(run).dump(2);
      });

  m.def("run_scenario", &run_scenario, py::arg("config"), py::arg("n_workers") = 0,
        py::call_guard<py::gil_scoped_release>());

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("applied_field_tesla", &SweepPoint::applied_field_tesla)
      .def_readonly("snr_snl_db", &SweepPoint::snr_snl_db)
      .def_readonly("snr_squeezed_db", &SweepPoint::snr_squeezed_db)
      .def_readonly("sensitivity_snl_t_per_sqrt_hz", &SweepPoint::sensitivity_snl_t_per_sqrt_hz)
      .def_readonly("sensitivity_squeezed_t_per_sqrt_hz",
                    &SweepPoint::sensitivity_squeezed_t_per_sqrt_hz)
      .def_readonly("note", &SweepPoint::note);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rotation_gain_rad_per_tesla", &SweepResult::rotation_gain_rad_per_tesla)
      .def_readonly("points", &SweepResult::points)
      .def_property_readonly("report_json", [](const SweepResult& sweep) {
        return sweep_report(sweep).dump(2);
      });

  m.def("run_sweep", &run_sweep, py::arg("config"), py::arg("n_workers") = 0,
        py::call_guard<py::gil_scoped_release>());
}
