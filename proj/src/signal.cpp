#include "fmcwsim/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fmcwsim/errors.hpp"
#include "fmcwsim/parallel.hpp"

namespace fmcwsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(j 2 pi cycles) with the integer part removed before scaling.
std::complex<double> unit_phasor(double cycles) {
  const double frac = cycles - std::floor(cycles);
  return std::polar(1.0, kTwoPi * frac);
}

void check_indices(const RadarConfig& cfg, std::uint32_t m, std::uint32_t l) {
  if (m < 1 || m > cfg.n_tx) throw OutOfRangeError("tx index must lie in 1..M");
  if (l < 1 || l > cfg.n_blocks) throw OutOfRangeError("block index must lie in 1..L");
}

// Doppler timing of chirp (m, l), 0-based indices.
double doppler_time(const RadarConfig& cfg, std::uint32_t m0, std::uint32_t l0) {
  const double slot = cfg.ideal_tdm ? double(l0) * cfg.n_tx : double(l0) * cfg.n_tx + m0;
  return slot * cfg.chirp_duration;
}

// One hit pixel of the driving frame.
struct Scatterer {
  double range;
  double velocity;
  double amplitude;
  double sin_az;
};

}  // namespace

void validate(const RadarConfig& cfg) {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw InvalidArgument(message);
  };
  require(cfg.carrier > 0.0 && std::isfinite(cfg.carrier), "carrier frequency must be > 0");
  require(cfg.bandwidth > 0.0 && std::isfinite(cfg.bandwidth), "bandwidth must be > 0");
  require(cfg.chirp_duration > 0.0 && std::isfinite(cfg.chirp_duration), "chirp duration must be > 0");
  require(cfg.sample_rate > 0.0 && std::isfinite(cfg.sample_rate), "sample rate must be > 0");
  require(cfg.samples_per_chirp >= 1 && cfg.n_tx >= 1 && cfg.n_rx >= 1 && cfg.n_blocks >= 1,
          "M, N, L and Ns must be >= 1");
  require(cfg.slope() > 0.0, "chirp slope must be > 0");
  require(cfg.spacing() > 0.0 && std::isfinite(cfg.spacing()), "rx spacing must be > 0");
  require(cfg.samples_per_chirp / cfg.sample_rate <= cfg.chirp_duration * (1.0 + 1e-12),
          "samples do not fit in a chirp (Ns / Fs > Tb)");
}

RadarCube::RadarCube(const RadarConfig& cfg, std::uint32_t cpi_index, double time)
    : cfg_(cfg),
      cpi_index_(cpi_index),
      time_(time),
      data_(std::size_t{cfg.n_virtual()} * cfg.n_blocks * cfg.samples_per_chirp) {}

double RadarCube::mean_power() const {
  if (data_.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& x : data_) sum += std::norm(x);
  return sum / static_cast<double>(data_.size());
}

double chirp_time(const RadarConfig& cfg, std::uint32_t m, std::uint32_t l) {
  check_indices(cfg, m, l);
  return ((double(l) - 1.0) * cfg.n_tx + (double(m) - 1.0)) * cfg.chirp_duration;
}

double pixel_phase(const RadarConfig& cfg, double range, double radial_velocity, double theta_az, std::uint32_t m,
                   std::uint32_t n, std::uint32_t l, std::uint32_t n_s) {
  check_indices(cfg, m, l);
  if (n < 1 || n > cfg.n_rx) throw OutOfRangeError("rx index must lie in 1..N");
  if (n_s < 1 || n_s > cfg.samples_per_chirp) throw OutOfRangeError("sample index must lie in 1..Ns");
  if (!(range > 0.0)) throw OutOfRangeError("range must be > 0");
  const double beat = 2.0 * cfg.slope() * range / kSpeedOfLight * (double(n_s) - 1.0) / cfg.sample_rate;
  const double doppler = 2.0 * cfg.carrier * radial_velocity / kSpeedOfLight * doppler_time(cfg, m - 1, l - 1);
  const double virtual_index = (double(m) - 1.0) * cfg.n_rx + double(n) - 1.0;
  const double array = virtual_index * cfg.spacing() / cfg.wavelength() * std::sin(theta_az);
  return kTwoPi * (beat - doppler + array);
}

RadarCube synthesize_cpi(std::span<const FrameMaps> frames, const RadarConfig& cfg, std::uint32_t cpi_index) {
  if (frames.empty()) throw EmptyInputError("synthesize_cpi needs at least one frame");
  validate(cfg);
  const FrameMaps& frame = frames.front();
  for (const auto& f : frames) {
    if (!f.consistent()) throw DimensionError("frame rasters do not match their grid");
    if (!(f.grid == frame.grid)) throw DimensionError("frames of one CPI must share a grid");
  }

  // Row-major pixel order fixes the summation order of every chirp.
  std::vector<Scatterer> scatterers;
  for (std::uint32_t el = 0; el < frame.grid.n_el; ++el) {
    for (std::uint32_t az = 0; az < frame.grid.n_az; ++az) {
      if (!frame.is_hit(el, az)) continue;
      const double theta_az = frame.grid.fov_az * ((az + 0.5) / frame.grid.n_az - 0.5);
      scatterers.push_back({frame.range(el, az), frame.radial_velocity(el, az), frame.amplitude(el, az),
                            std::sin(theta_az)});
    }
  }

  RadarCube cube(cfg, cpi_index, frame.time);
  const std::size_t n_pix = scatterers.size();
  if (n_pix == 0) return cube;

  const std::size_t ns = cfg.samples_per_chirp;
  const std::uint32_t n_chirps = cfg.n_virtual() * cfg.n_blocks;
  const double beat_scale = 2.0 * cfg.slope() / kSpeedOfLight / cfg.sample_rate;
  const double doppler_scale = 2.0 * cfg.carrier / kSpeedOfLight;
  const double array_scale = cfg.spacing() / cfg.wavelength();

  // Fast-time phasors, split real/imaginary so the chirp loop vectorizes.
  std::vector<double> fast_re(n_pix * ns);
  std::vector<double> fast_im(n_pix * ns);
  parallel_for(n_pix, [&](std::size_t k) {
    const double cycles_per_sample = beat_scale * scatterers[k].range;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto z = unit_phasor(cycles_per_sample * double(s));
      fast_re[k * ns + s] = z.real();
      fast_im[k * ns + s] = z.imag();
    }
  });

  parallel_for(n_chirps, [&](std::size_t chirp_index) {
    const auto v = static_cast<std::uint32_t>(chirp_index / cfg.n_blocks);
    const auto l0 = static_cast<std::uint32_t>(chirp_index % cfg.n_blocks);
    const std::uint32_t m0 = v / cfg.n_rx;
    const double t_doppler = doppler_time(cfg, m0, l0);

    std::vector<double> acc_re(ns, 0.0);
    std::vector<double> acc_im(ns, 0.0);
    for (std::size_t k = 0; k < n_pix; ++k) {
      const Scatterer& p = scatterers[k];
      const double cycles = -doppler_scale * p.velocity * t_doppler + double(v) * array_scale * p.sin_az;
      const std::complex<double> coef = p.amplitude * unit_phasor(cycles);
      const double cr = coef.real();
      const double ci = coef.imag();
      const double* fr = fast_re.data() + k * ns;
      const double* fi = fast_im.data() + k * ns;
      for (std::size_t s = 0; s < ns; ++s) {
        acc_re[s] += cr * fr[s] - ci * fi[s];
        acc_im[s] += cr * fi[s] + ci * fr[s];
      }
    }
    auto out = cube.chirp(v, l0);
    for (std::size_t s = 0; s < ns; ++s) out[s] = {acc_re[s], acc_im[s]};
  });
  return cube;
}

RadarCube add_noise(const RadarCube& cube, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return cube;
  if (!std::isfinite(snr_db)) throw InvalidArgument("snr_db must be finite or +inf");
  const double noise_power = cube.mean_power() / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(noise_power / 2.0);
  RadarCube noisy = cube;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& x : noisy.values()) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    x += std::complex<double>(sigma * re, sigma * im);
  }
  return noisy;
}

}  // namespace fmcwsim
