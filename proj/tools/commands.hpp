#pragma once

// Pipeline stages behind the fmcwsim command line. Each stage reads the
// previous stage's files from the output directory (or an explicit path) and
// writes its own, so running the stages one by one gives the same bytes as
// `simulate`.
//
// Output layout under output_dir:
//   frames/frame_NNNNN.fmap, frames/manifest.txt     render
//   cubes/cube_NNNNN.rcub,   cubes/manifest.txt      synth
//   rd/rd_NNNNN.pgm, rd/rd_NNNNN.csv, track.csv      process
//   truth.csv, velocity_errors.csv, eval_report.txt  eval

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fmcwsim/dsp.hpp"
#include "fmcwsim/eval.hpp"
#include "fmcwsim/scene.hpp"
#include "fmcwsim/signal.hpp"

namespace fmcwsim::cli {

struct DspConfig {
  WindowKind range_window = WindowKind::hann;
  WindowKind doppler_window = WindowKind::hann;
  FftPadding padding{};
  std::uint32_t frames_per_cpi = 1;
  bool export_csv = true;
};

struct RunConfig {
  nlohmann::json scene_document;  ///< resolved scene description
  std::uint32_t n_az = 64;
  std::uint32_t n_el = 64;
  RadarConfig radar{};
  DspConfig dsp{};
  std::string reference_target{kWalkerTorsoId};
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::optional<double> snr_db{};
  bool verbose = false;
  std::string digest;  ///< FNV-1a 64 of the canonical config, output_dir excluded

  Scene scene() const;
};

/// Parses a run-configuration document. Relative paths (the scene file and
/// output_dir) resolve against base_dir. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& document, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Recomputes cfg.digest after the seed or other fields were overridden.
void refresh_digest(RunConfig& cfg);

std::filesystem::path frame_manifest_path(const RunConfig& cfg);
std::filesystem::path cube_manifest_path(const RunConfig& cfg);
std::filesystem::path track_path(const RunConfig& cfg);
std::filesystem::path report_path(const RunConfig& cfg);

/// Renders every scene frame. Returns the frame manifest path.
std::filesystem::path cmd_render(const RunConfig& cfg);

/// One cube per CPI; CPI c is driven by frame c * frames_per_cpi. Returns the
/// cube manifest path. Throws EmptyInputError for an empty manifest.
std::filesystem::path cmd_synth(const RunConfig& cfg, const std::filesystem::path& frame_manifest);

/// Range-Doppler maps and the Doppler-time track. Returns the track path.
std::filesystem::path cmd_process(const RunConfig& cfg, const std::filesystem::path& cube_manifest);

struct EvalSummary {
  VelocityErrorReport errors;
  double doppler_bin_width = 0.0;             ///< m/s
  SinusoidFit track_fit;                      ///< fitted to the non-gap estimates
  double truth_peak_speed = 0.0;              ///< max |truth radial velocity|, m/s
  std::optional<double> tangential_speed{};   ///< reference target on a circle only
};

/// Compares a track CSV against scene ground truth and writes the report.
EvalSummary cmd_eval(const RunConfig& cfg, const std::filesystem::path& track_csv);

/// render -> synth -> process -> eval through the files above.
EvalSummary cmd_simulate(const RunConfig& cfg);

/// Process exit code for an exception escaping a stage: 2 configuration,
/// 3 file or I/O problem, 4 numeric or validation failure.
int exit_code_for(const std::exception& error);

}  // namespace fmcwsim::cli
