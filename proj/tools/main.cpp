// fmcwsim: scene -> frame maps -> radar cubes -> range-Doppler -> metrics.

#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "fmcwsim/errors.hpp"
#include "fmcwsim/parallel.hpp"

namespace {

using namespace fmcwsim;

struct Options {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  std::string frames;
  std::string cubes;
  std::string track;
};

cli::RunConfig prepare(const Options& opt) {
  cli::RunConfig cfg = cli::load_run_config(opt.config);
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.verbose = opt.verbose;
  cli::refresh_digest(cfg);
  set_max_threads(opt.threads);
  return cfg;
}

void print_summary(const cli::EvalSummary& s) {
  std::cout << "mean_velocity_error " << s.errors.mean_error << " m/s over " << s.errors.compared << " CPIs ("
            << s.errors.gaps << " gaps)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TDM-MIMO FMCW radar scene-to-datacube simulator"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    cmd->add_option("--threads", opt.threads, "Maximum worker threads (0 = all cores)");
    cmd->add_option("--seed", opt.seed, "Noise seed (overrides seed)");
    cmd->add_flag("--verbose,-v", opt.verbose, "Progress messages on stderr");
  };

  auto* render = app.add_subcommand("render", "Render scene frames to FMAP files");
  auto* synth = app.add_subcommand("synth", "Synthesize RCUB radar cubes from frame maps");
  auto* process = app.add_subcommand("process", "Range-Doppler processing and Doppler-time track");
  auto* eval = app.add_subcommand("eval", "Compare a track with ground truth");
  auto* simulate = app.add_subcommand("simulate", "Run render, synth, process and eval");
  for (auto* cmd : {render, synth, process, eval, simulate}) add_common(cmd);
  synth->add_option("--frames", opt.frames, "Frame manifest (default OUT/frames/manifest.txt)");
  process->add_option("--cubes", opt.cubes, "Cube manifest (default OUT/cubes/manifest.txt)");
  eval->add_option("--track", opt.track, "Track CSV (default OUT/track.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const cli::RunConfig cfg = prepare(opt);
    auto input_or = [](const std::string& given, const std::filesystem::path& fallback) {
      return given.empty() ? fallback : std::filesystem::path(given);
    };
    if (render->parsed()) {
      std::cout << cli::cmd_render(cfg).string() << '\n';
    } else if (synth->parsed()) {
      std::cout << cli::cmd_synth(cfg, input_or(opt.frames, cli::frame_manifest_path(cfg))).string() << '\n';
    } else if (process->parsed()) {
      std::cout << cli::cmd_process(cfg, input_or(opt.cubes, cli::cube_manifest_path(cfg))).string() << '\n';
    } else if (eval->parsed()) {
      print_summary(cli::cmd_eval(cfg, input_or(opt.track, cli::track_path(cfg))));
    } else {
      print_summary(cli::cmd_simulate(cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "fmcwsim: error: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
  return 0;
}
