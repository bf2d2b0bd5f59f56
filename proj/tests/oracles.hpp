#pragma once

// Test-only reference computations. Nothing here calls the library's
// transform or synthesis code paths.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "fmcwsim/render.hpp"
#include "fmcwsim/signal.hpp"

namespace fmcwsim::testing {

inline constexpr double kPi = std::numbers::pi;

/// Non-coherent range-Doppler magnitude map by direct O(n^2) DFT, using the
/// library's documented conventions: exp(-j) over fast time, exp(+j) over slow
/// time, Doppler row r holding signed bin r - nd/2. nr and nd are the
/// (zero-padded) transform lengths; 0 means the axis length.
inline std::vector<double> naive_range_doppler(const RadarCube& cube, const std::vector<double>& range_window,
                                               const std::vector<double>& doppler_window, std::size_t nr = 0,
                                               std::size_t nd = 0) {
  const std::size_t nv = cube.channels();
  const std::size_t nl = cube.blocks();
  const std::size_t ns = cube.samples();
  if (nr == 0) nr = ns;
  if (nd == 0) nd = nl;
  std::vector<double> out(nd * nr, 0.0);
  for (std::size_t v = 0; v < nv; ++v) {
    for (std::size_t row = 0; row < nd; ++row) {
      const double p = static_cast<double>(row) - static_cast<double>(nd / 2);
      for (std::size_t k = 0; k < nr; ++k) {
        std::complex<double> acc{};
        for (std::size_t l = 0; l < nl; ++l) {
          for (std::size_t s = 0; s < ns; ++s) {
            const double angle = -2.0 * kPi * double(k) * double(s) / double(nr) + 2.0 * kPi * p * double(l) / double(nd);
            acc += doppler_window[l] * range_window[s] * cube(v, l, s) * std::polar(1.0, angle);
          }
        }
        out[row * nr + k] += std::abs(acc);
      }
    }
  }
  return out;
}

/// Beat phase written out term by term from the signal model (1-based indices).
inline double model_phase(const RadarConfig& cfg, double R, double V, double theta, std::uint32_t m, std::uint32_t n,
                          std::uint32_t l, std::uint32_t n_s) {
  const double c = 299792458.0;
  const double mu = cfg.bandwidth / cfg.chirp_duration;
  const double lambda = c / cfg.carrier;
  const double dd = cfg.rx_spacing ? *cfg.rx_spacing : lambda / 2.0;
  const double M = cfg.n_tx, N = cfg.n_rx, Tb = cfg.chirp_duration;
  const double slot = cfg.ideal_tdm ? (l - 1.0) * M : (l - 1.0) * M + (m - 1.0);
  return 2.0 * kPi *
         ((2.0 * mu * R / c) * (n_s - 1.0) / cfg.sample_rate - (2.0 * cfg.carrier * V / c) * slot * Tb +
          ((m - 1.0) * N + n - 1.0) * (dd / lambda) * std::sin(theta));
}

/// Direct evaluation of the per-pixel beat sum, one exp per term.
inline RadarCube naive_synthesis(const FrameMaps& frame, const RadarConfig& cfg) {
  RadarCube cube(cfg, 0, frame.time);
  for (std::uint32_t el = 0; el < frame.grid.n_el; ++el) {
    for (std::uint32_t az = 0; az < frame.grid.n_az; ++az) {
      if (!(frame.range(el, az) < kMissRange)) continue;
      const double theta = frame.grid.fov_az * ((az + 0.5) / frame.grid.n_az - 0.5);
      for (std::uint32_t m = 1; m <= cfg.n_tx; ++m) {
        for (std::uint32_t n = 1; n <= cfg.n_rx; ++n) {
          for (std::uint32_t l = 1; l <= cfg.n_blocks; ++l) {
            for (std::uint32_t s = 1; s <= cfg.samples_per_chirp; ++s) {
              const double phase =
                  model_phase(cfg, frame.range(el, az), frame.radial_velocity(el, az), theta, m, n, l, s);
              cube((m - 1) * cfg.n_rx + n - 1, l - 1, s - 1) += double(frame.amplitude(el, az)) * std::polar(1.0, phase);
            }
          }
        }
      }
    }
  }
  return cube;
}

/// All-miss frame with the listed pixels set.
struct PixelSpec {
  std::uint32_t el;
  std::uint32_t az;
  float range;
  float amplitude;
  float velocity;
};

inline FrameMaps frame_with(const CameraGrid& grid, const std::vector<PixelSpec>& pixels, double time = 0.0) {
  FrameMaps maps = FrameMaps::empty(grid, 0, time);
  for (const auto& p : pixels) {
    maps.range(p.el, p.az) = p.range;
    maps.amplitude(p.el, p.az) = p.amplitude;
    maps.radial_velocity(p.el, p.az) = p.velocity;
  }
  return maps;
}

/// Small radar for O(n^2)-oracle tests.
inline RadarConfig small_radar(std::uint32_t n_tx = 2, std::uint32_t n_rx = 4, std::uint32_t blocks = 16,
                               std::uint32_t samples = 16) {
  RadarConfig cfg;
  cfg.n_tx = n_tx;
  cfg.n_rx = n_rx;
  cfg.n_blocks = blocks;
  cfg.samples_per_chirp = samples;
  cfg.sample_rate = 1e6;
  cfg.chirp_duration = 50e-6;
  cfg.bandwidth = 1.5e9;
  return cfg;
}

inline RadarCube random_cube(const RadarConfig& cfg, std::uint64_t seed) {
  RadarCube cube(cfg, 0, 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (auto& x : cube.values()) x = {g(rng), g(rng)};
  return cube;
}

inline double max_relative_error(const std::vector<double>& expected, std::span<const double> actual) {
  double peak = 0.0;
  for (double e : expected) peak = std::max(peak, std::abs(e));
  double worst = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) worst = std::max(worst, std::abs(expected[i] - actual[i]));
  return peak > 0.0 ? worst / peak : worst;
}

}  // namespace fmcwsim::testing
