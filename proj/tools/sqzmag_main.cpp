// Command line front end: squeezing metrics, polarimeter calibration, single
// scenario runs, amplitude sweeps, and the canned figure presets.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sqzmag/config.hpp"
#include "sqzmag/errors.hpp"
#include "sqzmag/harness.hpp"
#include "sqzmag/io.hpp"
#include "sqzmag/presets.hpp"
#include "sqzmag/squeezing.hpp"
#include "sqzmag/version.hpp"

namespace {

using namespace sqzmag;

struct CommonOpts {
  std::string out_dir = ".";
  std::string format = "text";
  unsigned workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out-dir", opts.out_dir, "Directory for output files")
      ->envname("SQZMAG_OUT_DIR");
  cmd->add_option("--format", opts.format, "Stdout format")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  cmd->add_option("--workers", opts.workers, "Worker threads (0 = auto)");
}

std::filesystem::path ensure_out_dir(const CommonOpts& opts) {
  std::filesystem::path dir(opts.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + opts.out_dir + "': " + ec.message());
  return dir;
}

NoiseMode parse_mode_flag(const std::string& value) {
  if (value == "squeezed") return NoiseMode::kSqueezed;
  if (value == "shot_noise_limited" || value == "snl") return NoiseMode::kShotNoiseLimited;
  throw ConfigError("unknown --noise-mode '" + value + "'");
}

void apply_overrides(ExperimentConfig& config, const std::optional<std::uint64_t>& seed,
                     const std::string& noise_mode) {
  if (seed) config.rng_seed = *seed;
  if (!noise_mode.empty()) config.noise_mode = parse_mode_flag(noise_mode);
}

// --- state ---------------------------------------------------------------

struct StateOpts {
  CommonOpts common;
  std::string config_path;
  double gain = 0.0;
  double eta_probe = 1.0;
  double eta_conjugate = -1.0;  // < 0: mirror eta_probe
  double seed_flux = 1.0;
  std::optional<double> infer_db;
};

int run_state(const StateOpts& opts) {
  FwmChain chain;
  if (!opts.config_path.empty()) {
    chain = parse_config_file(opts.config_path).chain;
  } else {
    if (!(opts.gain > 0)) throw ConfigError("state: give --config or --gain");
    chain.gain = opts.gain;
    chain.eta_probe = opts.eta_probe;
    chain.eta_conjugate = opts.eta_conjugate < 0 ? opts.eta_probe : opts.eta_conjugate;
    chain.seed_photon_flux = opts.seed_flux;
  }

  std::optional<double> inferred;
  if (opts.infer_db) {
    inferred = infer_efficiency(*opts.infer_db, chain.gain);
    chain.eta_probe = *inferred;
    chain.eta_conjugate = *inferred;
  }
  chain.validate();

  TwoModeGaussianState state = fwm_output_state(chain);
  NumberStatistics stats = photon_number_covariance(state);
  double npr = intensity_difference_noise_ratio(state);

  nlohmann::json j;
  j["gain"] = chain.gain;
  j["eta_probe"] = chain.eta_probe;
  j["eta_conjugate"] = chain.eta_conjugate;
  j["seed_photon_flux_per_second"] = chain.seed_photon_flux;
  if (inferred) j["eta_inferred_from_db"] = *inferred;
  j["mean_flux_probe_per_second"] = stats.mean_probe;
  j["mean_flux_conjugate_per_second"] = stats.mean_conjugate;
  j["noise_ratio_rel_snl"] = npr;
  j["noise_ratio_db"] = npr_to_db(npr);
  if (chain.eta_probe == chain.eta_conjugate)
    j["noise_ratio_closed_form"] = npr_equal_arms(chain.gain, chain.eta_probe);
  j["physicality_min_eigenvalue"] = state.physicality_eigenvalue();

  if (opts.common.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else if (opts.common.format == "csv") {
    std::cout << "key,value\n";
    for (auto& [key, value] : j.items()) std::cout << key << ',' << value.dump() << '\n';
  } else {
    for (auto& [key, value] : j.items()) std::cout << key << " = " << value.dump() << '\n';
  }
  return 0;
}

// --- calibrate -----------------------------------------------------------

struct CalibrateOpts {
  CommonOpts common;
  std::string config_path;
  double target = 0.0;
};

int run_calibrate(const CalibrateOpts& opts) {
  ExperimentConfig config = parse_config_file(opts.config_path);
  if (opts.target > 0) {
    config.calibration_target_t_per_sqrt_hz = opts.target;
    config.rotation_gain_rad_per_tesla.reset();
  }
  if (!config.calibration_target_t_per_sqrt_hz)
    throw ConfigError("calibrate: config has no calibration target (or give --target)");

  double kappa = calibrate_rotation_gain(*config.calibration_target_t_per_sqrt_hz,
                                         config.scenario(1.0));
  nlohmann::json j;
  j["target_sensitivity_tesla_per_sqrt_hz"] = *config.calibration_target_t_per_sqrt_hz;
  j["rotation_gain_rad_per_tesla"] = kappa;
  j["total_detected_flux_per_second"] =
      [&] {
        TwoModeGaussianState s = fwm_output_state(config.chain);
        return s.mean_flux_probe() + s.mean_flux_conjugate();
      }();

  if (opts.common.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else if (opts.common.format == "csv") {
    std::cout << "key,value\n";
    for (auto& [key, value] : j.items()) std::cout << key << ',' << value.dump() << '\n';
  } else {
    for (auto& [key, value] : j.items()) std::cout << key << " = " << value.dump() << '\n';
  }
  return 0;
}

// --- simulate ------------------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string noise_mode;
  std::string traces = "none";
  std::string prefix;
};

void print_channel_summary(const ScenarioRun& run, const std::string& format) {
  if (format == "json") {
    std::cout << scenario_report(run).dump(2) << '\n';
    return;
  }
  if (format == "csv") {
    std::cout << "channel,floor_db_rel_snl,tone_snr_db,sensitivity_tesla_per_sqrt_hz\n";
    for (const ChannelResult& ch : run.channels) {
      std::cout << channel_name(ch.channel) << ',' << ch.floor_db_rel_snl << ',';
      if (ch.tone_snr_db) std::cout << *ch.tone_snr_db;
      std::cout << ',';
      if (ch.sensitivity) std::cout << ch.sensitivity->sensitivity_t_per_sqrt_hz;
      std::cout << '\n';
    }
    return;
  }
  std::cout << "noise mode: " << noise_mode_name(run.scenario.noise_mode)
            << "  seed: " << run.scenario.rng_seed
            << "  rotation gain: " << run.rotation_gain_rad_per_tesla << " rad/T\n";
  std::cout << "model difference-channel noise: "
            << 10.0 * std::log10(run.expected_noise_rel_snl) << " dB rel SNL\n";
  for (const ChannelResult& ch : run.channels) {
    std::cout << channel_name(ch.channel) << ": floor " << ch.floor_db_rel_snl << " dB rel SNL";
    if (ch.tone_snr_db) std::cout << ", tone SNR " << *ch.tone_snr_db << " dB";
    if (ch.sensitivity)
      std::cout << ", sensitivity " << ch.sensitivity->sensitivity_t_per_sqrt_hz << " T/sqrt(Hz)";
    if (!ch.metrology_note.empty()) std::cout << " (" << ch.metrology_note << ")";
    std::cout << '\n';
  }
}

void write_scenario_artifacts(const ScenarioRun& run, const std::filesystem::path& dir,
                              const std::string& prefix, const std::string& traces_mode) {
  for (const ChannelResult& ch : run.channels) {
    std::string name = prefix + "spectrum_" + channel_name(ch.channel) + ".csv";
    write_spectrum_csv((dir / name).string(), ch.spectrum, run.config.frequency_scale);
  }
  write_json((dir / (prefix + "report.json")).string(), scenario_report(run));
  if (traces_mode == "csv" || traces_mode == "both")
    write_traces_csv((dir / (prefix + "traces.csv")).string(), run.traces);
  if (traces_mode == "bin" || traces_mode == "both")
    write_traces_binary((dir / (prefix + "traces.bin")).string(), run.traces);
}

// A tone was requested but no channel could measure it.
bool tone_unmeasured(const ScenarioRun& run) {
  if (!(run.scenario.drive.ac_amplitude_tesla > 0)) return false;
  for (const ChannelResult& ch : run.channels)
    if (ch.sensitivity) return false;
  return true;
}

int run_simulate(const SimulateOpts& opts) {
  ExperimentConfig config = parse_config_file(opts.config_path);
  apply_overrides(config, opts.seed, opts.noise_mode);

  ScenarioRun run = run_scenario(config, opts.common.workers);
  std::filesystem::path dir = ensure_out_dir(opts.common);
  write_scenario_artifacts(run, dir, opts.prefix, opts.traces);
  print_channel_summary(run, opts.common.format);

  if (tone_unmeasured(run))
    throw MetrologyError("tone at " + std::to_string(config.drive.ac_frequency_hz) +
                         " Hz not measurable on any analyzed channel");
  return 0;
}

// --- sweep ---------------------------------------------------------------

struct SweepOpts {
  CommonOpts common;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string prefix;
};

void print_sweep_summary(const SweepResult& sweep, const std::string& format) {
  if (format == "json") {
    std::cout << sweep_report(sweep).dump(2) << '\n';
    return;
  }
  if (format == "csv") {
    std::cout << "applied_field_tesla,snr_snl_db,snr_squeezed_db,"
                 "sensitivity_snl_tesla_per_sqrt_hz,sensitivity_squeezed_tesla_per_sqrt_hz\n";
    for (const SweepPoint& p : sweep.points)
      std::cout << p.applied_field_tesla << ',' << p.snr_snl_db << ',' << p.snr_squeezed_db << ','
                << p.sensitivity_snl_t_per_sqrt_hz << ','
                << p.sensitivity_squeezed_t_per_sqrt_hz << '\n';
    return;
  }
  std::cout << "rotation gain: " << sweep.rotation_gain_rad_per_tesla << " rad/T\n";
  for (const SweepPoint& p : sweep.points) {
    std::cout << p.applied_field_tesla << " T: SNR snl " << p.snr_snl_db << " dB, squeezed "
              << p.snr_squeezed_db << " dB, sensitivity snl "
              << p.sensitivity_snl_t_per_sqrt_hz << ", squeezed "
              << p.sensitivity_squeezed_t_per_sqrt_hz << " T/sqrt(Hz)";
    if (!p.note.empty()) std::cout << " (" << p.note << ")";
    std::cout << '\n';
  }
}

int run_sweep_cmd(const SweepOpts& opts) {
  ExperimentConfig config = parse_config_file(opts.config_path);
  apply_overrides(config, opts.seed, "");

  SweepResult sweep = run_sweep(config, opts.common.workers);
  std::filesystem::path dir = ensure_out_dir(opts.common);
  write_sweep_csv((dir / (opts.prefix + "sweep.csv")).string(), sweep);
  write_json((dir / (opts.prefix + "report.json")).string(), sweep_report(sweep));
  print_sweep_summary(sweep, opts.common.format);
  return 0;
}

// --- reproduce -----------------------------------------------------------

struct ReproduceOpts {
  CommonOpts common;
  int figure = 0;
  std::optional<std::uint64_t> seed;
};

int run_reproduce(const ReproduceOpts& opts) {
  std::string name = "fig" + std::to_string(opts.figure);
  ExperimentConfig config =
      parse_config_text("schema_version = 1\npreset = " + name + "\n", "<reproduce>");
  apply_overrides(config, opts.seed, "");
  std::filesystem::path dir = ensure_out_dir(opts.common);

  if (opts.figure == 4) {
    SweepResult sweep = run_sweep(config, opts.common.workers);
    write_sweep_csv((dir / (name + "_sweep.csv")).string(), sweep);
    write_json((dir / (name + "_report.json")).string(), sweep_report(sweep));
    print_sweep_summary(sweep, opts.common.format);
    return 0;
  }

  if (opts.figure == 2) {
    // Both traces of the figure: squeezed and the shot-noise reference.
    nlohmann::json combined;
    for (NoiseMode mode : {NoiseMode::kSqueezed, NoiseMode::kShotNoiseLimited}) {
      config.noise_mode = mode;
      ScenarioRun run = run_scenario(config, opts.common.workers);
      std::string suffix = mode == NoiseMode::kSqueezed ? "squeezed" : "snl";
      write_spectrum_csv((dir / (name + "_spectrum_" + suffix + ".csv")).string(),
                         run.channels.front().spectrum, config.frequency_scale);
      combined[noise_mode_name(mode)] = scenario_report(run);
      if (opts.common.format != "json") print_channel_summary(run, opts.common.format);
    }
    write_json((dir / (name + "_report.json")).string(), combined);
    if (opts.common.format == "json") std::cout << combined.dump(2) << '\n';
    return 0;
  }

  ScenarioRun run = run_scenario(config, opts.common.workers);
  write_scenario_artifacts(run, dir, name + "_", "none");
  print_channel_summary(run, opts.common.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed-light magnetometer simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  StateOpts state_opts;
  CLI::App* state = app.add_subcommand("state", "Squeezing metrics of a four-wave-mixing chain");
  state->add_option("--config", state_opts.config_path, "Config file supplying the chain");
  state->add_option("--gain", state_opts.gain, "Intensity gain G");
  state->add_option("--eta-probe", state_opts.eta_probe, "Probe arm transmission");
  state->add_option("--eta-conjugate", state_opts.eta_conjugate, "Conjugate arm transmission");
  state->add_option("--seed-flux", state_opts.seed_flux, "Seed photon flux (1/s)");
  state->add_option("--infer-db", state_opts.infer_db,
                    "Infer equal-arm transmission from this noise reduction (dB)");
  add_common(state, state_opts.common);

  CalibrateOpts cal_opts;
  CLI::App* cal = app.add_subcommand("calibrate", "Resolve the polarimeter rotation gain");
  cal->add_option("--config", cal_opts.config_path, "Config file")->required();
  cal->add_option("--target", cal_opts.target, "Override target sensitivity (T/sqrt(Hz))");
  add_common(cal, cal_opts.common);

  SimulateOpts sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "Synthesize one scenario and analyze it");
  sim->add_option("--config", sim_opts.config_path, "Config file")->required();
  sim->add_option("--seed", sim_opts.seed, "Override rng seed");
  sim->add_option("--noise-mode", sim_opts.noise_mode, "Override noise mode")
      ->check(CLI::IsMember({"squeezed", "shot_noise_limited", "snl"}));
  sim->add_option("--traces", sim_opts.traces, "Also write raw traces")
      ->check(CLI::IsMember({"none", "csv", "bin", "both"}));
  sim->add_option("--prefix", sim_opts.prefix, "Output file name prefix");
  add_common(sim, sim_opts.common);

  SweepOpts sweep_opts;
  CLI::App* swp = app.add_subcommand("sweep", "Run the config's amplitude sweep");
  swp->add_option("--config", sweep_opts.config_path, "Config file")->required();
  swp->add_option("--seed", sweep_opts.seed, "Override base rng seed");
  swp->add_option("--prefix", sweep_opts.prefix, "Output file name prefix");
  add_common(swp, sweep_opts.common);

  ReproduceOpts rep_opts;
  CLI::App* rep = app.add_subcommand("reproduce", "Run a built-in figure preset");
  rep->add_option("--figure", rep_opts.figure, "Figure number")
      ->required()
      ->check(CLI::IsMember({2, 3, 4}));
  rep->add_option("--seed", rep_opts.seed, "Override rng seed");
  add_common(rep, rep_opts.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (state->parsed()) return run_state(state_opts);
    if (cal->parsed()) return run_calibrate(cal_opts);
    if (sim->parsed()) return run_simulate(sim_opts);
    if (swp->parsed()) return run_sweep_cmd(sweep_opts);
    if (rep->parsed()) return run_reproduce(rep_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibilityError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const MetrologyError& e) {
    std::cerr << "not measurable: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
