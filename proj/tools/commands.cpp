#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <sstream>

#include "fmcwsim/config_node.hpp"
#include "fmcwsim/errors.hpp"
#include "fmcwsim/ingest.hpp"
#include "fmcwsim/parallel.hpp"
#include "fmcwsim/render.hpp"

namespace fmcwsim::cli {
namespace {

namespace fs = std::filesystem;

std::string indexed_name(const char* prefix, std::uint32_t index, const char* extension) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%s_%05u.%s", prefix, index, extension);
  return buffer;
}

std::string fixed(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

WindowKind parse_window(ConfigNode& node, const std::string& key) {
  const std::string name = node.text(key, "hann");
  if (name == "hann") return WindowKind::hann;
  if (name == "rect") return WindowKind::rect;
  node.fail(key, "unknown window '" + name + "' (rect, hann)");
}

std::string window_name(WindowKind kind) { return kind == WindowKind::hann ? "hann" : "rect"; }

std::uint32_t padding_factor(ConfigNode& node, const std::string& key) {
  const std::uint32_t factor = node.count(key, 1, 1);
  if (factor != 1 && factor != 2 && factor != 4) node.fail(key, "padding must be 1, 2 or 4");
  return factor;
}

nlohmann::json canonical(const RunConfig& cfg) {
  nlohmann::json radar = {
      {"carrier_hz", cfg.radar.carrier},
      {"bandwidth_hz", cfg.radar.bandwidth},
      {"chirp_duration_s", cfg.radar.chirp_duration},
      {"samples_per_chirp", cfg.radar.samples_per_chirp},
      {"sample_rate_hz", cfg.radar.sample_rate},
      {"n_tx", cfg.radar.n_tx},
      {"n_rx", cfg.radar.n_rx},
      {"n_blocks", cfg.radar.n_blocks},
      {"rx_spacing_m", cfg.radar.spacing()},
  };
  return {
      {"scene", cfg.scene_document},
      {"render", {{"n_az", cfg.n_az}, {"n_el", cfg.n_el}}},
      {"radar", radar},
      {"dsp",
       {{"range_window", window_name(cfg.dsp.range_window)},
        {"doppler_window", window_name(cfg.dsp.doppler_window)},
        {"range_padding", cfg.dsp.padding.range},
        {"doppler_padding", cfg.dsp.padding.doppler},
        {"frames_per_cpi", cfg.dsp.frames_per_cpi},
        {"export_csv", cfg.dsp.export_csv}}},
      {"eval", {{"reference_target", cfg.reference_target}}},
      {"seed", cfg.seed},
      {"snr_db", cfg.snr_db ? nlohmann::json(*cfg.snr_db) : nlohmann::json(nullptr)},
      {"ideal_tdm", cfg.radar.ideal_tdm},
  };
}

void log(const RunConfig& cfg, const std::string& message) {
  if (cfg.verbose) std::clog << "[fmcwsim] " << message << '\n';
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

Scene RunConfig::scene() const { return parse_scene(scene_document, "scene"); }

RunConfig parse_run_config(const nlohmann::json& document, const fs::path& base_dir) {
  ConfigNode root(document, "");
  RunConfig cfg;

  const auto& scene_value = root.raw("scene");
  if (scene_value.is_string()) {
    fs::path scene_path = scene_value.get<std::string>();
    if (scene_path.is_relative()) scene_path = base_dir / scene_path;
    try {
      cfg.scene_document = load_json_file(scene_path);
    } catch (const IoError&) {
      throw ConfigError("scene", "cannot open scene file " + scene_path.string());
    }
  } else if (scene_value.is_object()) {
    cfg.scene_document = scene_value;
  } else {
    root.fail("scene", "expected a scene file path or an inline scene object");
  }
  (void)cfg.scene();  // validates

  if (root.has("render")) {
    ConfigNode render = root.child("render");
    cfg.n_az = render.count("n_az", cfg.n_az, 1);
    cfg.n_el = render.count("n_el", cfg.n_el, 1);
    render.finish();
  }

  if (root.has("radar")) {
    ConfigNode radar = root.child("radar");
    RadarConfig& r = cfg.radar;
    r.carrier = radar.number("carrier_hz", r.carrier);
    r.bandwidth = radar.number("bandwidth_hz", r.bandwidth);
    r.chirp_duration = radar.number("chirp_duration_s", r.chirp_duration);
    r.samples_per_chirp = radar.count("samples_per_chirp", r.samples_per_chirp, 1);
    r.sample_rate = radar.number("sample_rate_hz", r.sample_rate);
    r.n_tx = radar.count("n_tx", r.n_tx, 1);
    r.n_rx = radar.count("n_rx", r.n_rx, 1);
    r.n_blocks = radar.count("n_blocks", r.n_blocks, 1);
    r.rx_spacing = radar.optional_number("rx_spacing_m");
    radar.finish();
  }
  cfg.radar.ideal_tdm = root.flag("ideal_tdm", false);
  try {
    validate(cfg.radar);
  } catch (const InvalidArgument& e) {
    throw ConfigError("radar", e.what());
  }

  if (root.has("dsp")) {
    ConfigNode dsp = root.child("dsp");
    cfg.dsp.range_window = parse_window(dsp, "range_window");
    cfg.dsp.doppler_window = parse_window(dsp, "doppler_window");
    cfg.dsp.padding.range = padding_factor(dsp, "range_padding");
    cfg.dsp.padding.doppler = padding_factor(dsp, "doppler_padding");
    cfg.dsp.frames_per_cpi = dsp.count("frames_per_cpi", 1, 1);
    cfg.dsp.export_csv = dsp.flag("export_csv", true);
    dsp.finish();
  }

  if (root.has("eval")) {
    ConfigNode eval = root.child("eval");
    cfg.reference_target = eval.text("reference_target", cfg.reference_target);
    eval.finish();
  }
  if (!cfg.scene().find(cfg.reference_target)) {
    throw ConfigError("eval.reference_target", "no scene target with id '" + cfg.reference_target + "'");
  }

  cfg.output_dir = root.text("output_dir", "out");
  if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
  cfg.seed = root.unsigned64("seed", 0);
  cfg.snr_db = root.optional_number("snr_db");
  root.finish();
  refresh_digest(cfg);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(load_json_file(path), path.parent_path());
}

void refresh_digest(RunConfig& cfg) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical(cfg).dump())));
  cfg.digest = buffer;
}

fs::path frame_manifest_path(const RunConfig& cfg) { return cfg.output_dir / "frames" / "manifest.txt"; }
fs::path cube_manifest_path(const RunConfig& cfg) { return cfg.output_dir / "cubes" / "manifest.txt"; }
fs::path track_path(const RunConfig& cfg) { return cfg.output_dir / "track.csv"; }
fs::path report_path(const RunConfig& cfg) { return cfg.output_dir / "eval_report.txt"; }

fs::path cmd_render(const RunConfig& cfg) {
  const Scene scene = cfg.scene();
  const CameraGrid grid = make_grid(scene.sensor(), cfg.n_az, cfg.n_el);
  const fs::path dir = cfg.output_dir / "frames";
  ensure_directory(dir);

  std::vector<std::string> names(scene.frame_count());
  parallel_for(scene.frame_count(), [&](std::size_t f) {
    const auto index = static_cast<std::uint32_t>(f);
    names[f] = indexed_name("frame", index, "fmap");
    write_frame(render_frame(scene, grid, index), dir / names[f]);
  });
  const fs::path manifest = frame_manifest_path(cfg);
  write_manifest(manifest, names, {"fmcwsim frame maps", "renderer: built-in ray caster"});
  log(cfg, "rendered " + std::to_string(names.size()) + " frames to " + dir.string());
  return manifest;
}

fs::path cmd_synth(const RunConfig& cfg, const fs::path& frame_manifest) {
  const std::vector<FrameMaps> frames = read_sequence(frame_manifest);
  const std::uint32_t per_cpi = cfg.dsp.frames_per_cpi;
  const auto n_cpi = static_cast<std::uint32_t>((frames.size() + per_cpi - 1) / per_cpi);
  const fs::path dir = cfg.output_dir / "cubes";
  ensure_directory(dir);

  std::vector<std::string> names(n_cpi);
  parallel_for(n_cpi, [&](std::size_t c) {
    const auto cpi = static_cast<std::uint32_t>(c);
    const std::size_t first = c * per_cpi;
    const std::size_t count = std::min<std::size_t>(per_cpi, frames.size() - first);
    RadarCube cube = synthesize_cpi(std::span(frames).subspan(first, count), cfg.radar, cpi);
    if (cfg.snr_db) cube = add_noise(cube, *cfg.snr_db, splitmix64(cfg.seed ^ splitmix64(cpi)));
    names[c] = indexed_name("cube", cpi, "rcub");
    write_cube(cube, dir / names[c]);
  });
  const fs::path manifest = cube_manifest_path(cfg);
  write_manifest(manifest, names, {"fmcwsim radar cubes"});
  log(cfg, "synthesized " + std::to_string(n_cpi) + " cubes to " + dir.string());
  return manifest;
}

fs::path cmd_process(const RunConfig& cfg, const fs::path& cube_manifest) {
  const std::vector<fs::path> files = read_manifest(cube_manifest);
  if (files.empty()) throw EmptyInputError("cube manifest " + cube_manifest.string() + " lists no cubes");
  const fs::path dir = cfg.output_dir / "rd";
  ensure_directory(dir);

  std::vector<RangeDopplerMap> maps(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    const RadarCube cube = read_cube(files[i]);
    const auto range_window = window(cfg.dsp.range_window, cube.samples());
    const auto doppler_window = window(cfg.dsp.doppler_window, cube.blocks());
    maps[i] = range_doppler(cube, range_window, doppler_window, cfg.dsp.padding);
    write_range_doppler_pgm(maps[i], dir / indexed_name("rd", maps[i].cpi_index, "pgm"));
    if (cfg.dsp.export_csv) write_range_doppler_csv(maps[i], dir / indexed_name("rd", maps[i].cpi_index, "csv"));
  });
  std::stable_sort(maps.begin(), maps.end(),
                   [](const RangeDopplerMap& a, const RangeDopplerMap& b) { return a.cpi_index < b.cpi_index; });
  const DopplerTrack track = extract_track(maps);
  write_track_csv(track, track_path(cfg));
  log(cfg, "processed " + std::to_string(maps.size()) + " cubes, track in " + track_path(cfg).string());
  return track_path(cfg);
}

EvalSummary cmd_eval(const RunConfig& cfg, const fs::path& track_csv) {
  const Scene scene = cfg.scene();
  const DopplerTrack track = read_track_csv(track_csv);
  const GroundTruthTrack truth = ground_truth_track(scene, cfg.reference_target);

  EvalSummary summary;
  summary.errors = mean_velocity_error(track, truth);
  summary.doppler_bin_width = bin_to_velocity(cfg.radar, 1.0, std::size_t{cfg.radar.n_blocks} * cfg.dsp.padding.doppler);
  for (const auto& s : truth.samples) summary.truth_peak_speed = std::max(summary.truth_peak_speed, std::abs(s.radial_velocity));
  if (const auto* circle = std::get_if<CircularPath>(&scene.find(cfg.reference_target)->trajectory)) {
    summary.tangential_speed = 2.0 * std::numbers::pi * circle->radius / std::abs(circle->period);
  }

  std::vector<double> t, v;
  for (const auto& e : summary.errors.entries) {
    t.push_back(e.time);
    v.push_back(e.estimated);
  }
  const double span = t.empty() ? 0.0 : t.back() - t.front();
  if (t.size() >= 4 && span > 0.0) {
    summary.track_fit = fit_sinusoid(t, v, span / 4.0, span * 4.0);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    summary.track_fit = {nan, nan, nan, nan, nan};
  }

  ensure_directory(cfg.output_dir);
  {
    std::ostringstream out;
    out << "time_s,radial_velocity_mps\n";
    for (const auto& s : truth.samples) out << fixed(s.time) << ',' << fixed(s.radial_velocity) << '\n';
    write_file_atomically(cfg.output_dir / "truth.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "time_s,estimated_mps,truth_mps,abs_error_mps\n";
    for (const auto& e : summary.errors.entries) {
      out << fixed(e.time) << ',' << fixed(e.estimated) << ',' << fixed(e.truth) << ',' << fixed(e.abs_error) << '\n';
    }
    write_file_atomically(cfg.output_dir / "velocity_errors.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "# fmcwsim evaluation report\n";
    out << "config_digest = " << cfg.digest << '\n';
    out << "reference_target = " << cfg.reference_target << '\n';
    out << "# metric name value units\n";
    auto metric = [&](const char* name, double value, const char* units) {
      out << "metric " << name << ' ' << fixed(value) << ' ' << units << '\n';
    };
    metric("mean_velocity_error", summary.errors.mean_error, "m/s");
    metric("compared_cpis", static_cast<double>(summary.errors.compared), "count");
    metric("gap_cpis", static_cast<double>(summary.errors.gaps), "count");
    metric("doppler_bin_width", summary.doppler_bin_width, "m/s");
    metric("truth_peak_speed", summary.truth_peak_speed, "m/s");
    if (summary.tangential_speed) metric("tangential_speed", *summary.tangential_speed, "m/s");
    metric("track_fit_period", summary.track_fit.period, "s");
    metric("track_fit_amplitude", summary.track_fit.amplitude, "m/s");
    metric("track_fit_offset", summary.track_fit.offset, "m/s");
    metric("track_fit_rms_residual", summary.track_fit.rms_residual, "m/s");
    write_file_atomically(report_path(cfg), out.str());
  }
  log(cfg, "mean velocity error " + fixed(summary.errors.mean_error) + " m/s over " +
               std::to_string(summary.errors.compared) + " CPIs");
  return summary;
}

EvalSummary cmd_simulate(const RunConfig& cfg) {
  const fs::path frames = cmd_render(cfg);
  const fs::path cubes = cmd_synth(cfg, frames);
  const fs::path track = cmd_process(cfg, cubes);
  return cmd_eval(cfg, track);
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return 2;
  if (dynamic_cast<const IoError*>(&error) || dynamic_cast<const FileFormatError*>(&error) ||
      dynamic_cast<const GapError*>(&error) || dynamic_cast<const InconsistencyError*>(&error) ||
      dynamic_cast<const EmptyInputError*>(&error) || dynamic_cast<const std::filesystem::filesystem_error*>(&error)) {
    return 3;
  }
  return 4;
}

}  // namespace fmcwsim::cli
