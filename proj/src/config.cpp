#include "sqzmag/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "sqzmag/errors.hpp"
#include "sqzmag/presets.hpp"

namespace sqzmag {
namespace {

struct RawEntry {
  std::string value;
  std::string source;
  int line = 0;
};

using EntryMap = std::map<std::string, RawEntry>;  // "section/key" -> entry

std::string slot(const std::string& section, const std::string& key) {
  return section + "/" + key;
}

std::string where(const RawEntry& e) {
  return e.source + ":" + std::to_string(e.line);
}

std::string section_label(const std::string& section) {
  return section.empty() ? "at top level" : "in section [" + section + "]";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> table{
      {"", {"schema_version", "preset"}},
      {"chain", {"gain", "eta_probe", "eta_conjugate", "seed_photon_flux_per_second"}},
      {"drive", {"dc_field_tesla", "ac_amplitude_tesla", "ac_frequency_hz", "phase_radians"}},
      {"calibration", {"target_sensitivity_tesla_per_sqrt_hz"}},
      {"scenario",
       {"rotation_gain_rad_per_tesla", "pbs_sign_probe", "pbs_sign_conjugate",
        "classical_noise_rel_snl", "sample_rate_hz", "duration_seconds", "rng_seed", "noise_mode",
        "frequency_scale"}},
      {"spectrum",
       {"rbw_hz", "vbw_hz", "trace_averages", "window", "center_frequency_hz", "span_hz",
        "channels"}},
      {"sweep", {"amplitudes_tesla", "min_tesla", "max_tesla", "points"}},
      {"metadata",
       {"pump_power_mw", "probe_power_uw", "cell_length_inches", "temperature_celsius",
        "beam_angle_mrad", "probe_offset_mhz", "conjugate_offset_mhz", "dc_residual_ut_max",
        "cell_transmission"}},
  };
  return table;
}

// Splits one config text into schema-checked entries and annotation lines.
void collect_entries(std::string_view text, const std::string& source, EntryMap& out,
                     std::vector<std::string>& annotations) {
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.rfind("#:", 0) == 0) {
      annotations.emplace_back(trim(line.substr(2)));
      continue;
    }
    if (line.front() == '#') continue;

    std::string ctx = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(ctx + ": malformed section header '" + std::string(line) + "'");
      std::string name{trim(line.substr(1, line.size() - 2))};
      if (!schema().count(name))
        throw ConfigError(ctx + ": unknown section [" + name + "]");
      section = name;
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(ctx + ": expected 'key = value', got '" + std::string(line) + "'");
    std::string key{trim(line.substr(0, eq))};
    std::string_view rhs = line.substr(eq + 1);
    // inline comments start at '#'
    if (std::size_t hash = rhs.find('#'); hash != std::string_view::npos) rhs = rhs.substr(0, hash);
    std::string value{trim(rhs)};
    if (key.empty()) throw ConfigError(ctx + ": empty key");
    if (value.empty()) throw ConfigError(ctx + ": empty value for key '" + key + "'");

    const auto& known = schema().at(section);
    if (!known.count(key))
      throw ConfigError(ctx + ": unknown key '" + key + "' " + section_label(section));

    auto [it, inserted] = out.emplace(slot(section, key), RawEntry{value, source, line_no});
    if (!inserted)
      throw ConfigError(ctx + ": duplicate key '" + key + "' " + section_label(section) +
                        " (first at " + where(it->second) + ")");
  }
}

double parse_number(const RawEntry& e, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(where(e) + ": value '" + e.value + "' for key '" + key +
                      "' is not a finite number");
  return v;
}

long long parse_integer(const RawEntry& e, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError(where(e) + ": value '" + e.value + "' for key '" + key +
                      "' is not an integer");
  return v;
}

std::uint64_t parse_unsigned(const RawEntry& e, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
  if (end == e.value.c_str() || *end != '\0' || errno == ERANGE || e.value.front() == '-')
    throw ConfigError(where(e) + ": value '" + e.value + "' for key '" + key +
                      "' is not a non-negative integer");
  return v;
}

class ConfigReader {
 public:
  ConfigReader(EntryMap entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  const RawEntry* find(const std::string& sec, const std::string& key) const {
    auto it = entries_.find(slot(sec, key));
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool has(const std::string& sec, const std::string& key) const { return find(sec, key); }

  const RawEntry& require(const std::string& sec, const std::string& key) const {
    const RawEntry* e = find(sec, key);
    if (!e)
      throw ConfigError(source_ + ": missing required key '" + key + "' " + section_label(sec));
    return *e;
  }

  double number(const std::string& sec, const std::string& key) const {
    return parse_number(require(sec, key), key);
  }

  double number_or(const std::string& sec, const std::string& key, double fallback) const {
    const RawEntry* e = find(sec, key);
    return e ? parse_number(*e, key) : fallback;
  }

  std::optional<double> optional_number(const std::string& sec, const std::string& key) const {
    const RawEntry* e = find(sec, key);
    if (!e) return std::nullopt;
    return parse_number(*e, key);
  }

  long long integer_or(const std::string& sec, const std::string& key, long long fallback) const {
    const RawEntry* e = find(sec, key);
    return e ? parse_integer(*e, key) : fallback;
  }

  std::uint64_t unsigned_or(const std::string& sec, const std::string& key,
                            std::uint64_t fallback) const {
    const RawEntry* e = find(sec, key);
    return e ? parse_unsigned(*e, key) : fallback;
  }

  std::string string_or(const std::string& sec, const std::string& key,
                        const std::string& fallback) const {
    const RawEntry* e = find(sec, key);
    return e ? e->value : fallback;
  }

  const std::string& source() const { return source_; }

 private:
  EntryMap entries_;
  std::string source_;
};

int parse_sign(const ConfigReader& r, const std::string& key, int fallback) {
  const RawEntry* e = r.find("scenario", key);
  if (!e) return fallback;
  long long v = parse_integer(*e, key);
  if (v != 1 && v != -1)
    throw ConfigError(where(*e) + ": key '" + key + "' must be 1 or -1, got '" + e->value + "'");
  return static_cast<int>(v);
}

Window parse_window(const ConfigReader& r) {
  const RawEntry* e = r.find("spectrum", "window");
  if (!e) return Window::kHann;
  if (e->value == "hann") return Window::kHann;
  if (e->value == "rectangular") return Window::kRectangular;
  throw ConfigError(where(*e) + ": window must be 'hann' or 'rectangular', got '" + e->value +
                    "'");
}

NoiseMode parse_noise_mode(const ConfigReader& r) {
  const RawEntry* e = r.find("scenario", "noise_mode");
  if (!e) return NoiseMode::kSqueezed;
  if (e->value == "squeezed") return NoiseMode::kSqueezed;
  if (e->value == "shot_noise_limited" || e->value == "snl") return NoiseMode::kShotNoiseLimited;
  throw ConfigError(where(*e) + ": noise_mode must be 'squeezed' or 'shot_noise_limited', got '" +
                    e->value + "'");
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string_view item =
        value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    items.emplace_back(trim(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<TraceChannel> parse_channels(const ConfigReader& r) {
  const RawEntry* e = r.find("spectrum", "channels");
  if (!e) return {TraceChannel::kDifference};
  std::vector<TraceChannel> channels;
  for (const std::string& item : split_list(e->value)) {
    TraceChannel ch;
    if (item == "probe") {
      ch = TraceChannel::kProbe;
    } else if (item == "conjugate") {
      ch = TraceChannel::kConjugate;
    } else if (item == "difference") {
      ch = TraceChannel::kDifference;
    } else {
      throw ConfigError(where(*e) + ": unknown channel '" + item +
                        "' (expected probe, conjugate, difference)");
    }
    if (std::find(channels.begin(), channels.end(), ch) != channels.end())
      throw ConfigError(where(*e) + ": duplicate channel '" + item + "'");
    channels.push_back(ch);
  }
  if (channels.empty()) throw ConfigError(where(*e) + ": empty channel list");
  return channels;
}

std::optional<SweepSpec> parse_sweep(const ConfigReader& r) {
  const RawEntry* list = r.find("sweep", "amplitudes_tesla");
  bool has_range = r.has("sweep", "min_tesla") || r.has("sweep", "max_tesla") ||
                   r.has("sweep", "points");
  if (!list && !has_range) return std::nullopt;
  if (list && has_range)
    throw ConfigError(where(*list) +
                      ": give either amplitudes_tesla or min_tesla/max_tesla/points, not both");

  SweepSpec spec;
  if (list) {
    for (const std::string& item : split_list(list->value)) {
      if (item.empty())
        throw ConfigError(where(*list) + ": empty entry in amplitudes_tesla");
      RawEntry fake{item, list->source, list->line};
      spec.amplitudes_tesla.push_back(parse_number(fake, "amplitudes_tesla"));
    }
    if (spec.amplitudes_tesla.empty())
      throw ConfigError(where(*list) + ": amplitudes_tesla must list at least one amplitude");
  } else {
    double lo = r.number("sweep", "min_tesla");
    double hi = r.number("sweep", "max_tesla");
    long long points = r.integer_or("sweep", "points", -1);
    if (points < 2)
      throw ConfigError(r.source() + ": [sweep] points must be an integer >= 2");
    if (!(lo > 0) || !(hi > lo))
      throw ConfigError(r.source() + ": [sweep] requires 0 < min_tesla < max_tesla");
    for (long long i = 0; i < points; ++i) {
      double frac = static_cast<double>(i) / static_cast<double>(points - 1);
      spec.amplitudes_tesla.push_back(lo * std::pow(hi / lo, frac));
    }
  }
  return spec;
}

ExperimentConfig build_config(const ConfigReader& r, std::string preset_name,
                              std::vector<std::string> annotations) {
  ExperimentConfig cfg;
  cfg.preset_name = std::move(preset_name);
  cfg.annotations = std::move(annotations);

  cfg.chain.gain = r.number("chain", "gain");
  cfg.chain.eta_probe = r.number("chain", "eta_probe");
  cfg.chain.eta_conjugate = r.number("chain", "eta_conjugate");
  cfg.chain.seed_photon_flux = r.number("chain", "seed_photon_flux_per_second");

  cfg.drive.dc_field_tesla = r.number_or("drive", "dc_field_tesla", 0.0);
  cfg.drive.ac_amplitude_tesla = r.number("drive", "ac_amplitude_tesla");
  cfg.drive.ac_frequency_hz = r.number("drive", "ac_frequency_hz");
  cfg.drive.phase_radians = r.number_or("drive", "phase_radians", 0.0);

  cfg.rotation_gain_rad_per_tesla = r.optional_number("scenario", "rotation_gain_rad_per_tesla");
  cfg.calibration_target_t_per_sqrt_hz =
      r.optional_number("calibration", "target_sensitivity_tesla_per_sqrt_hz");

  cfg.pbs_sign_probe = parse_sign(r, "pbs_sign_probe", +1);
  cfg.pbs_sign_conjugate = parse_sign(r, "pbs_sign_conjugate", -1);
  cfg.classical_noise_rel_snl = r.number_or("scenario", "classical_noise_rel_snl", 0.0);
  cfg.sample_rate_hz = r.number("scenario", "sample_rate_hz");
  cfg.rng_seed = r.unsigned_or("scenario", "rng_seed", 1);
  cfg.noise_mode = parse_noise_mode(r);
  cfg.frequency_scale = r.number_or("scenario", "frequency_scale", 1.0);

  cfg.spectrum.rbw_hz = r.number("spectrum", "rbw_hz");
  cfg.spectrum.vbw_hz = r.number_or("spectrum", "vbw_hz", cfg.spectrum.rbw_hz);
  long long averages = r.integer_or("spectrum", "trace_averages", 100);
  if (averages < 1) throw ConfigError(r.source() + ": trace_averages must be >= 1");
  cfg.spectrum.trace_averages = static_cast<int>(averages);
  cfg.spectrum.window = parse_window(r);
  if (const RawEntry* e = r.find("spectrum", "center_frequency_hz")) {
    cfg.spectrum.center_frequency_hz = parse_number(*e, "center_frequency_hz");
  } else if (cfg.drive.ac_frequency_hz > 0) {
    cfg.spectrum.center_frequency_hz = cfg.drive.ac_frequency_hz;
  } else {
    throw ConfigError(r.source() +
                      ": center_frequency_hz is required when the drive frequency is zero");
  }
  if (const RawEntry* e = r.find("spectrum", "span_hz")) {
    cfg.spectrum.span_hz = parse_number(*e, "span_hz");
  } else {
    // Default span: ~100 bins, clipped to the analysis band.
    double scale = cfg.frequency_scale > 0 ? cfg.frequency_scale : 1.0;
    double center_sim = cfg.spectrum.center_frequency_hz / scale;
    double nyquist_sim = cfg.sample_rate_hz / scale / 2.0;
    double half = std::min({50.0 * cfg.spectrum.rbw_hz, center_sim, nyquist_sim - center_sim});
    if (!(half > 0))
      throw ConfigError(r.source() + ": cannot choose a default span_hz; give one explicitly");
    cfg.spectrum.span_hz = 2.0 * half * scale;
  }

  if (const RawEntry* e = r.find("scenario", "duration_seconds")) {
    cfg.duration_seconds = parse_number(*e, "duration_seconds");
  } else {
    // Default: exactly the trace the averaged spectrum consumes.
    cfg.duration_seconds = static_cast<double>(cfg.spectrum.trace_averages *
                                               cfg.spectrum.vbw_average_factor()) /
                           cfg.spectrum.rbw_hz;
  }

  cfg.channels = parse_channels(r);
  cfg.sweep = parse_sweep(r);

  cfg.metadata.pump_power_mw = r.optional_number("metadata", "pump_power_mw");
  cfg.metadata.probe_power_uw = r.optional_number("metadata", "probe_power_uw");
  cfg.metadata.cell_length_inches = r.optional_number("metadata", "cell_length_inches");
  cfg.metadata.temperature_celsius = r.optional_number("metadata", "temperature_celsius");
  cfg.metadata.beam_angle_mrad = r.optional_number("metadata", "beam_angle_mrad");
  cfg.metadata.probe_offset_mhz = r.optional_number("metadata", "probe_offset_mhz");
  cfg.metadata.conjugate_offset_mhz = r.optional_number("metadata", "conjugate_offset_mhz");
  cfg.metadata.dc_residual_ut_max = r.optional_number("metadata", "dc_residual_ut_max");
  cfg.metadata.cell_transmission = r.optional_number("metadata", "cell_transmission");

  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  try {
    chain.validate();
    drive.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  if (rotation_gain_rad_per_tesla && calibration_target_t_per_sqrt_hz)
    throw ConfigError(
        "give either scenario.rotation_gain_rad_per_tesla or "
        "calibration.target_sensitivity_tesla_per_sqrt_hz, not both");
  if (!rotation_gain_rad_per_tesla && !calibration_target_t_per_sqrt_hz)
    throw ConfigError(
        "either scenario.rotation_gain_rad_per_tesla or "
        "calibration.target_sensitivity_tesla_per_sqrt_hz is required");
  if (rotation_gain_rad_per_tesla && !(*rotation_gain_rad_per_tesla > 0))
    throw ConfigError("rotation_gain_rad_per_tesla must be positive");
  if (calibration_target_t_per_sqrt_hz && !(*calibration_target_t_per_sqrt_hz > 0))
    throw ConfigError("target_sensitivity_tesla_per_sqrt_hz must be positive");

  if (!std::isfinite(frequency_scale) || frequency_scale < 1.0)
    throw ConfigError("frequency_scale must be a finite value >= 1");

  try {
    spectrum.validate();
    scenario(1.0).validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  // Segment feasibility: enough trace for the requested averaging.
  double fs_sim = sample_rate_hz / frequency_scale;
  long long seg = spectrum.segment_length(fs_sim);
  if (seg < 16)
    throw ConfigError("rbw_hz " + std::to_string(spectrum.rbw_hz) +
                      " Hz leaves fewer than 16 samples per segment at the simulated sample rate");
  long long segments = static_cast<long long>(spectrum.trace_averages) *
                       spectrum.vbw_average_factor();
  double needed_seconds = static_cast<double>(segments) * static_cast<double>(seg) / fs_sim;
  double have_samples = duration_seconds * fs_sim;
  if (static_cast<double>(segments) * static_cast<double>(seg) > have_samples * (1 + 1e-9)) {
    std::ostringstream msg;
    msg << "rbw_hz " << spectrum.rbw_hz << " with " << segments
        << " averaged segments needs " << needed_seconds
        << " s of trace, but duration_seconds is " << duration_seconds << " s";
    throw InfeasibilityError(msg.str());
  }

  double center_sim = spectrum.center_frequency_hz / frequency_scale;
  double span_sim = spectrum.span_hz / frequency_scale;
  double f_lo = center_sim - span_sim / 2.0;
  double f_hi = center_sim + span_sim / 2.0;
  if (f_lo < -1e-9 || f_hi > fs_sim / 2.0 + 1e-9) {
    std::ostringstream msg;
    msg << "analysis span [" << f_lo << ", " << f_hi
        << "] Hz (simulated) exceeds the band [0, " << fs_sim / 2.0 << "] Hz";
    throw ConfigError(msg.str());
  }

  if (sweep) {
    if (sweep->amplitudes_tesla.empty())
      throw ConfigError("sweep amplitude list is empty");
    for (double a : sweep->amplitudes_tesla)
      if (!std::isfinite(a) || a <= 0)
        throw ConfigError("sweep amplitudes must be finite and positive");
  }

  if (channels.empty()) throw ConfigError("channel list is empty");

  if (rotation_gain_rad_per_tesla) {
    double theta = *rotation_gain_rad_per_tesla *
                   (std::abs(drive.dc_field_tesla) + drive.ac_amplitude_tesla);
    if (!(theta < std::numbers::pi / 4.0))
      throw InfeasibilityError(
          "rotation_gain_rad_per_tesla drives the polarimeter outside its linear range "
          "(|theta| reaches " +
          std::to_string(theta) + " rad)");
  }
}

MagnetometerScenario ExperimentConfig::scenario(double rotation_gain) const {
  MagnetometerScenario s;
  s.chain = chain;
  s.drive = drive;
  s.drive.ac_frequency_hz = drive.ac_frequency_hz / frequency_scale;
  s.rotation_gain_rad_per_tesla = rotation_gain;
  s.pbs_sign_probe = pbs_sign_probe;
  s.pbs_sign_conjugate = pbs_sign_conjugate;
  s.classical_noise_rel_snl = classical_noise_rel_snl;
  s.sample_rate_hz = sample_rate_hz / frequency_scale;
  s.duration_seconds = duration_seconds;
  s.rng_seed = rng_seed;
  s.noise_mode = noise_mode;
  return s;
}

SpectrumConfig ExperimentConfig::simulated_spectrum() const {
  SpectrumConfig sp = spectrum;
  sp.center_frequency_hz = spectrum.center_frequency_hz / frequency_scale;
  sp.span_hz = spectrum.span_hz / frequency_scale;
  return sp;
}

double ExperimentConfig::resolve_rotation_gain() const {
  if (rotation_gain_rad_per_tesla) return *rotation_gain_rad_per_tesla;
  return calibrate_rotation_gain(*calibration_target_t_per_sqrt_hz, scenario(1.0));
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name) {
  EntryMap user_entries;
  std::vector<std::string> user_annotations;
  collect_entries(text, source_name, user_entries, user_annotations);

  EntryMap merged;
  std::vector<std::string> annotations;
  std::string preset_name;

  if (auto it = user_entries.find(slot("", "preset")); it != user_entries.end()) {
    preset_name = it->second.value;
    if (!has_preset(preset_name))
      throw ConfigError(where(it->second) + ": unknown preset '" + preset_name +
                        "' (available: fig2, fig3, fig4)");
    collect_entries(preset_text(preset_name), preset_name + " preset", merged, annotations);
    if (merged.count(slot("", "preset")))
      throw ConfigError("preset '" + preset_name + "' may not reference another preset");
  }

  for (auto& [key, entry] : user_entries) merged[key] = entry;
  annotations.insert(annotations.end(), user_annotations.begin(), user_annotations.end());

  ConfigReader reader(std::move(merged), source_name);
  const RawEntry& version = reader.require("", "schema_version");
  if (parse_integer(version, "schema_version") != 1)
    throw ConfigError(where(version) + ": unsupported schema_version '" + version.value +
                      "' (this build reads version 1)");

  ExperimentConfig cfg = build_config(reader, preset_name, std::move(annotations));
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace sqzmag
