#pragma once

// TDM-MIMO FMCW beat-signal synthesis from rendered frame maps.
//
// Every hit pixel is a point scatterer. For transmitter m (1..M), receiver
// n (1..N), TDM block l (1..L) and fast-time sample n_s (1..Ns) its phase is
//
//   2 pi [ (2 mu R / c) (n_s - 1) / Fs
//          - (2 f_c V / c) ((l - 1) M + (m - 1)) Tb
//          + ((m - 1) N + n - 1) (dd / lambda) sin(theta_az) ]
//
// The Doppler term uses the physical start time of each chirp. With
// ideal_tdm the (m - 1) Tb offset inside a block is dropped, so all
// transmitters of a block see the same Doppler phase.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fmcwsim/render.hpp"

namespace fmcwsim {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RadarConfig {
  double carrier = 77e9;          ///< Hz
  double bandwidth = 1.5e9;       ///< Hz
  double chirp_duration = 50e-6;  ///< Tb, s
  std::uint32_t samples_per_chirp = 256;
  double sample_rate = 10e6;  ///< Hz
  std::uint32_t n_tx = 3;
  std::uint32_t n_rx = 4;
  std::uint32_t n_blocks = 64;           ///< TDM blocks per CPI
  std::optional<double> rx_spacing{};    ///< m; half a wavelength when unset
  bool ideal_tdm = false;

  double slope() const { return bandwidth / chirp_duration; }
  double wavelength() const { return kSpeedOfLight / carrier; }
  double spacing() const { return rx_spacing.value_or(0.5 * wavelength()); }
  std::uint32_t n_virtual() const { return n_tx * n_rx; }
  double block_duration() const { return n_tx * chirp_duration; }

  friend bool operator==(const RadarConfig&, const RadarConfig&) = default;
};

/// Throws InvalidArgument when counts are zero, slope or spacing are not
/// positive, or the samples do not fit in a chirp (Ns / Fs > Tb).
void validate(const RadarConfig& cfg);

/// Beat samples indexed [virtual channel][block][fast-time sample], with the
/// virtual channel v = (m - 1) N + (n - 1).
class RadarCube {
 public:
  RadarCube() = default;
  RadarCube(const RadarConfig& cfg, std::uint32_t cpi_index, double time);

  const RadarConfig& config() const noexcept { return cfg_; }
  std::uint32_t cpi_index() const noexcept { return cpi_index_; }
  double time() const noexcept { return time_; }

  std::size_t channels() const noexcept { return cfg_.n_virtual(); }
  std::size_t blocks() const noexcept { return cfg_.n_blocks; }
  std::size_t samples() const noexcept { return cfg_.samples_per_chirp; }

  std::complex<double>& operator()(std::size_t v, std::size_t l, std::size_t s) {
    return data_[(v * blocks() + l) * samples() + s];
  }
  const std::complex<double>& operator()(std::size_t v, std::size_t l, std::size_t s) const {
    return data_[(v * blocks() + l) * samples() + s];
  }

  /// Fast-time samples of one chirp.
  std::span<std::complex<double>> chirp(std::size_t v, std::size_t l) {
    return {data_.data() + (v * blocks() + l) * samples(), samples()};
  }
  std::span<const std::complex<double>> chirp(std::size_t v, std::size_t l) const {
    return {data_.data() + (v * blocks() + l) * samples(), samples()};
  }

  std::span<std::complex<double>> values() noexcept { return data_; }
  std::span<const std::complex<double>> values() const noexcept { return data_; }

  double mean_power() const;

 private:
  RadarConfig cfg_{};
  std::uint32_t cpi_index_ = 0;
  double time_ = 0.0;
  std::vector<std::complex<double>> data_;
};

/// Start of chirp (m, l), 1-based, relative to the CPI start: ((l-1) M + (m-1)) Tb.
double chirp_time(const RadarConfig& cfg, std::uint32_t m, std::uint32_t l);

/// Phase of one pixel scatterer in radians; indices are 1-based as in the
/// model above. Throws OutOfRangeError for non-positive range or bad indices.
double pixel_phase(const RadarConfig& cfg, double range, double radial_velocity, double theta_az, std::uint32_t m,
                   std::uint32_t n, std::uint32_t l, std::uint32_t n_s);

/// Sums every hit pixel of the frame driving this CPI (frames.front()); range
/// and velocity stay frozen for the whole CPI. All frames must share a grid.
RadarCube synthesize_cpi(std::span<const FrameMaps> frames, const RadarConfig& cfg, std::uint32_t cpi_index = 0);

/// Adds circular complex Gaussian noise so that mean signal power over noise
/// power equals 10^(snr_db / 10). snr_db = +inf returns the cube unchanged.
/// The output depends only on the cube, snr_db, and seed.
RadarCube add_noise(const RadarCube& cube, double snr_db, std::uint64_t seed);

// --- RCUB files (see FORMATS.md) ---------------------------------------------

inline constexpr char kCubeMagic[4] = {'R', 'C', 'U', 'B'};
inline constexpr std::uint16_t kCubeFormatVersion = 1;
inline constexpr std::size_t kCubeHeaderBytes = 78;

/// Samples are narrowed to complex float pairs. Returns bytes written.
std::size_t write_cube(const RadarCube& cube, std::ostream& out);
std::size_t write_cube(const RadarCube& cube, const std::filesystem::path& path);
RadarCube read_cube(std::istream& in);
RadarCube read_cube(const std::filesystem::path& path);

}  // namespace fmcwsim
