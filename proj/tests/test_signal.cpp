#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fmcwsim/dsp.hpp"
#include "fmcwsim/errors.hpp"
#include "fmcwsim/signal.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace fmcwsim {
namespace {

using testing::frame_with;
using testing::kPi;
using testing::model_phase;
using testing::small_radar;

double wrap(double phase) { return std::remainder(phase, 2.0 * kPi); }

double max_abs_diff(const RadarCube& a, const RadarCube& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

RadarCube synth(const FrameMaps& frame, const RadarConfig& cfg) { return synthesize_cpi({&frame, 1}, cfg); }

TEST(Radar, DefaultsAndDerivedQuantities) {
  const RadarConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.slope(), 3e13);
  EXPECT_EQ(cfg.n_virtual(), 12u);
  EXPECT_NEAR(cfg.spacing(), 0.5 * 299792458.0 / 77e9, 1e-15);
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Radar, ValidationRejectsSamplesLongerThanChirp) {
  RadarConfig cfg;
  cfg.sample_rate = 1e6;  // 256 us of samples in a 50 us chirp
  EXPECT_THROW(validate(cfg), InvalidArgument);
  cfg = {};
  cfg.n_rx = 0;
  EXPECT_THROW(validate(cfg), InvalidArgument);
}

TEST(ChirpTime, StartTimes) {
  const RadarConfig cfg;
  EXPECT_DOUBLE_EQ(chirp_time(cfg, 1, 1), 0.0);
  EXPECT_NEAR(chirp_time(cfg, 2, 1), 50e-6, 1e-18);
  EXPECT_NEAR(chirp_time(cfg, 1, 2), 150e-6, 1e-18);
  EXPECT_NEAR(chirp_time(cfg, 3, 64), (63 * 3 + 2) * 50e-6, 1e-15);
  EXPECT_THROW(chirp_time(cfg, 0, 1), OutOfRangeError);
  EXPECT_THROW(chirp_time(cfg, 1, 65), OutOfRangeError);
}

TEST(PixelPhase, MatchesModelTermByTerm) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (bool ideal : {false, true}) {
    RadarConfig cfg;
    cfg.ideal_tdm = ideal;
    for (int i = 0; i < 500; ++i) {
      const double R = 0.5 + 20 * u(rng), V = 10 * (u(rng) - 0.5), th = 1.2 * (u(rng) - 0.5);
      const auto m = 1 + std::uint32_t(rng() % 3), n = 1 + std::uint32_t(rng() % 4);
      const auto l = 1 + std::uint32_t(rng() % 64), s = 1 + std::uint32_t(rng() % 256);
      EXPECT_NEAR(wrap(pixel_phase(cfg, R, V, th, m, n, l, s) - model_phase(cfg, R, V, th, m, n, l, s)), 0.0, 1e-9);
    }
  }
  EXPECT_THROW(pixel_phase(RadarConfig{}, 0.0, 0, 0, 1, 1, 1, 1), OutOfRangeError);
  EXPECT_THROW(pixel_phase(RadarConfig{}, 1.0, 0, 0, 1, 5, 1, 1), OutOfRangeError);
}

TEST(PixelPhase, FastTimeSlope) {
  const RadarConfig cfg;
  const double R = 10.0;
  // 2 pi * 2 mu R / (c Fs) per sample
  const double step = 2.0 * kPi * 2.0 * 3e13 * R / (299792458.0 * 10e6);
  for (std::uint32_t s = 1; s < 256; s += 17) {
    EXPECT_NEAR(wrap(pixel_phase(cfg, R, 1.0, 0.2, 2, 3, 5, s + 1) - pixel_phase(cfg, R, 1.0, 0.2, 2, 3, 5, s) - step),
                0.0, 1e-9);
  }
}

TEST(PixelPhase, AdjacentVirtualChannelsStep) {
  const RadarConfig cfg;  // M N = 12, half-wavelength spacing
  const double theta = std::asin(2.0 / 12.0);
  // (dd / lambda) sin(theta) = 1/12 cycle per channel
  EXPECT_NEAR(wrap(pixel_phase(cfg, 5.0, 0.0, theta, 1, 2, 1, 1) - pixel_phase(cfg, 5.0, 0.0, theta, 1, 1, 1, 1)),
              2.0 * kPi / 12.0, 1e-12);
  EXPECT_NEAR(wrap(pixel_phase(cfg, 5.0, 0.0, theta, 2, 1, 1, 1) - pixel_phase(cfg, 5.0, 0.0, theta, 1, 4, 1, 1)),
              2.0 * kPi / 12.0, 1e-12);
}

TEST(Synthesis, MatchesDirectSummation) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (bool ideal : {false, true}) {
    RadarConfig cfg = small_radar(2, 4, 8, 16);
    cfg.ideal_tdm = ideal;
    const CameraGrid grid{5, 3, 0.8, 0.4};
    std::vector<testing::PixelSpec> pixels;
    for (int i = 0; i < 7; ++i) {
      pixels.push_back({std::uint32_t(rng() % 3), std::uint32_t(rng() % 5), float(1 + 40 * u(rng)), float(u(rng)),
                        float(6 * (u(rng) - 0.5))});
    }
    const FrameMaps frame = frame_with(grid, pixels);
    const RadarCube fast = synth(frame, cfg);
    const RadarCube slow = testing::naive_synthesis(frame, cfg);
    EXPECT_LT(max_abs_diff(fast, slow), 1e-9);
  }
}

TEST(Synthesis, SinglePixelLandsOnExpectedRangeBin) {
  const RadarConfig cfg;
  const CameraGrid grid{1, 1, 0.1, 0.1};
  const RadarCube cube = synth(frame_with(grid, {{0, 0, 10.0f, 1.0f, 0.0f}}), cfg);
  const auto rect_r = window(WindowKind::rect, cfg.samples_per_chirp);
  const auto rect_d = window(WindowKind::rect, cfg.n_blocks);
  const RangeDopplerMap map = range_doppler(cube, rect_r, rect_d);
  std::size_t best = 0;
  for (std::size_t k = 0; k < map.magnitudes.cols(); ++k) {
    if (map.magnitudes(cfg.n_blocks / 2, k) > map.magnitudes(cfg.n_blocks / 2, best)) best = k;
  }
  // round(2 mu R Ns / (c Fs)) = round(51.235)
  EXPECT_EQ(best, 51u);
}

TEST(Synthesis, LinearInAmplitude) {
  const RadarConfig cfg = small_radar();
  const CameraGrid grid{3, 2, 0.5, 0.3};
  const auto a = synth(frame_with(grid, {{0, 1, 7.0f, 0.25f, 1.5f}, {1, 2, 3.0f, 0.5f, -0.5f}}), cfg);
  const auto b = synth(frame_with(grid, {{0, 1, 7.0f, 0.75f, 1.5f}, {1, 2, 3.0f, 1.5f, -0.5f}}), cfg);
  for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_NEAR(std::abs(b.values()[i] - 3.0 * a.values()[i]), 0.0, 1e-12);
}

TEST(Synthesis, Superposition) {
  const RadarConfig cfg = small_radar();
  const CameraGrid grid{4, 4, 0.5, 0.3};
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const testing::PixelSpec p{std::uint32_t(rng() % 4), std::uint32_t(rng() % 2), float(2 + 30 * u(rng)),
                               float(u(rng)), float(4 * (u(rng) - 0.5))};
    const testing::PixelSpec q{std::uint32_t(rng() % 4), 2 + std::uint32_t(rng() % 2), float(2 + 30 * u(rng)),
                               float(u(rng)), float(4 * (u(rng) - 0.5))};
    const auto both = synth(frame_with(grid, {p, q}), cfg);
    const auto one = synth(frame_with(grid, {p}), cfg);
    const auto two = synth(frame_with(grid, {q}), cfg);
    for (std::size_t i = 0; i < both.values().size(); ++i) {
      EXPECT_LT(std::abs(both.values()[i] - one.values()[i] - two.values()[i]), 1e-9);
    }
  }
}

TEST(Synthesis, EmptyFrameGivesZeroCube) {
  const RadarCube cube = synth(FrameMaps::empty(CameraGrid{3, 3, 0.5, 0.5}, 0, 0.0), small_radar());
  for (const auto& x : cube.values()) EXPECT_EQ(x, std::complex<double>{});
}

TEST(Synthesis, StaticTargetIsConstantInSlowTime) {
  const RadarConfig cfg = small_radar();
  const auto cube = synth(frame_with(CameraGrid{2, 2, 0.5, 0.5}, {{0, 0, 6.0f, 1.0f, 0.0f}, {1, 1, 9.0f, 0.3f, 0.0f}}), cfg);
  for (std::size_t v = 0; v < cube.channels(); ++v)
    for (std::size_t l = 1; l < cube.blocks(); ++l)
      for (std::size_t s = 0; s < cube.samples(); ++s) EXPECT_LT(std::abs(cube(v, l, s) - cube(v, 0, s)), 1e-12);
}

TEST(Synthesis, OppositeVelocitiesAndAnglesConjugate) {
  const RadarConfig cfg = small_radar();
  const CameraGrid grid{2, 1, 0.6, 0.2};  // columns at -0.15 and +0.15 rad
  const auto base = synth(frame_with(grid, {{0, 0, 5.0f, 1.0f, 0.0f}}), cfg);
  const auto plus = synth(frame_with(grid, {{0, 0, 5.0f, 1.0f, 2.0f}}), cfg);
  const auto minus = synth(frame_with(grid, {{0, 0, 5.0f, 1.0f, -2.0f}}), cfg);
  const auto mirrored = synth(frame_with(grid, {{0, 1, 5.0f, 1.0f, 0.0f}}), cfg);
  for (std::size_t i = 0; i < base.values().size(); ++i) {
    const auto b = base.values()[i];
    EXPECT_LT(std::abs(plus.values()[i] / b - std::conj(minus.values()[i] / b)), 1e-9);
  }
  // Zero range cycle at s = 0, so the remaining phase is the array term.
  for (std::size_t v = 0; v < base.channels(); ++v) {
    EXPECT_LT(std::abs(base(v, 0, 0) - std::conj(mirrored(v, 0, 0))), 1e-12);
  }
}

TEST(Synthesis, NegatedVelocityConjugatesFirstSample) {
  // n_s = 1 and theta = 0 leave only the Doppler term.
  RadarConfig cfg = small_radar();
  const CameraGrid grid{1, 1, 0.1, 0.1};
  const auto plus = synth(frame_with(grid, {{0, 0, 5.0f, 0.7f, 1.3f}}), cfg);
  const auto minus = synth(frame_with(grid, {{0, 0, 5.0f, 0.7f, -1.3f}}), cfg);
  for (std::size_t v = 0; v < plus.channels(); ++v)
    for (std::size_t l = 0; l < plus.blocks(); ++l) EXPECT_LT(std::abs(minus(v, l, 0) - std::conj(plus(v, l, 0))), 1e-12);
}

TEST(Synthesis, VirtualArrayPhaseIsLinear) {
  for (bool ideal : {false, true}) {
    RadarConfig cfg = small_radar(3, 4, 4, 8);
    cfg.ideal_tdm = ideal;
    const auto cube = synth(frame_with(CameraGrid{3, 1, 0.9, 0.1}, {{0, 2, 8.0f, 1.0f, 0.0f}}), cfg);
    const double step = 2.0 * kPi * 0.5 * std::sin(0.3);  // pixel 2 of 3 over 0.9 rad sits at +0.3 rad
    for (std::size_t v = 1; v < cube.channels(); ++v) {
      EXPECT_NEAR(wrap(std::arg(cube(v, 2, 3)) - std::arg(cube(0, 2, 3)) - double(v) * step), 0.0, 1e-6);
    }
  }
}

TEST(Synthesis, TdmOffsetShiftsTransmitters) {
  // A moving target picks up an extra -2 pi (2 f V / c) Tb per transmitter in
  // the non-ideal schedule and none in the ideal one.
  RadarConfig cfg = small_radar(3, 1, 4, 8);
  const auto frame = frame_with(CameraGrid{1, 1, 0.1, 0.1}, {{0, 0, 8.0f, 1.0f, 3.0f}});
  const double per_tx = -2.0 * kPi * 2.0 * cfg.carrier * 3.0 / 299792458.0 * cfg.chirp_duration;
  const auto real = synth(frame, cfg);
  cfg.ideal_tdm = true;
  const auto ideal = synth(frame, cfg);
  for (std::size_t m = 1; m < 3; ++m) {
    EXPECT_NEAR(wrap(std::arg(real(m, 1, 0) / ideal(m, 1, 0)) - double(m) * per_tx), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(ideal(m, 1, 0) - ideal(0, 1, 0)), 0.0, 1e-12);
  }
}

TEST(Noise, InfiniteSnrIsIdentity) {
  const RadarCube cube = testing::random_cube(small_radar(), 3);
  const RadarCube same = add_noise(cube, std::numeric_limits<double>::infinity(), 42);
  EXPECT_EQ(max_abs_diff(cube, same), 0.0);
  EXPECT_THROW(add_noise(cube, std::nan(""), 1), InvalidArgument);
}

TEST(Noise, SeedIsReproducible) {
  const RadarCube cube = testing::random_cube(small_radar(), 3);
  EXPECT_EQ(max_abs_diff(add_noise(cube, 10.0, 42), add_noise(cube, 10.0, 42)), 0.0);
  EXPECT_GT(max_abs_diff(add_noise(cube, 10.0, 42), add_noise(cube, 10.0, 43)), 0.0);
}

TEST(Noise, MeasuredSnrMatchesRequest) {
  RadarConfig cfg;
  cfg.n_blocks = 330;  // 12 * 330 * 256 = 1.01e6 samples
  const auto clean = synth(frame_with(CameraGrid{2, 1, 0.4, 0.1}, {{0, 0, 4.0f, 0.5f, 1.0f}, {0, 1, 9.0f, 0.2f, -2.0f}}), cfg);
  for (double snr : {-10.0, 0.0, 20.0}) {
    const auto noisy = add_noise(clean, snr, 1234);
    double noise = 0.0;
    for (std::size_t i = 0; i < clean.values().size(); ++i) noise += std::norm(noisy.values()[i] - clean.values()[i]);
    noise /= double(clean.values().size());
    EXPECT_NEAR(10.0 * std::log10(clean.mean_power() / noise), snr, 0.1);
  }
}

RadarCube float_rounded(const RadarCube& cube) {
  RadarCube out = cube;
  for (auto& x : out.values()) x = {double(float(x.real())), double(float(x.imag()))};
  return out;
}

TEST(Rcub, RoundTrip) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    RadarConfig cfg = small_radar(1 + rng() % 3, 1 + rng() % 4, 1 + rng() % 8, 1 + rng() % 16);
    cfg.ideal_tdm = rng() % 2;
    if (rng() % 2) cfg.rx_spacing = 0.003;
    RadarCube cube = testing::random_cube(cfg, rng());
    cube = float_rounded(cube);
    std::stringstream io(std::ios::in | std::ios::out | std::ios::binary);
    const std::size_t bytes = write_cube(cube, io);
    EXPECT_EQ(bytes, kCubeHeaderBytes + 8 * cube.values().size());
    const RadarCube back = read_cube(io);
    EXPECT_EQ(back.config(), cube.config());
    EXPECT_EQ(back.cpi_index(), cube.cpi_index());
    EXPECT_EQ(max_abs_diff(back, cube), 0.0);
  }
}

TEST(Rcub, Errors) {
  const RadarCube cube = testing::random_cube(small_radar(), 1);
  std::ostringstream out(std::ios::binary);
  write_cube(cube, out);
  const std::string good = out.str();
  auto parse = [](std::string bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return read_cube(in);
  };
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(parse(bad), FormatError);
  EXPECT_THROW(parse(good.substr(0, good.size() - 3)), CorruptionError);
  EXPECT_THROW(parse(good.substr(0, 40)), CorruptionError);
  bad = good;
  bad[4] = 9;
  EXPECT_THROW(parse(bad), VersionError);
  testing::TempDir dir("rcub");
  write_cube(cube, dir / "c.rcub");
  EXPECT_EQ(read_cube(dir / "c.rcub").values().size(), cube.values().size());
  EXPECT_THROW(read_cube(dir / "none.rcub"), IoError);
}

}  // namespace
}  // namespace fmcwsim
