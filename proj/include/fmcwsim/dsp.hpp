#pragma once

// Target estimation: windowed range/Doppler FFTs, non-coherent channel sum,
// angle FFT across the virtual array, and Doppler-time track extraction.
//
// Transform conventions:
//   range    X[k] = sum_s w[s] x[s] exp(-j 2 pi k s / Nr)
//   Doppler  Y[p] = sum_l w[l] X_l   exp(+j 2 pi p l / Nd), shifted so p = 0
//            sits at row Nd / 2 and a receding target (V > 0) lands on p > 0
//   angle    A[u] = sum_v Y_v exp(-j 2 pi u v / (M N))

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fmcwsim/raster.hpp"
#include "fmcwsim/signal.hpp"

namespace fmcwsim {

enum class WindowKind { rect, hann };

/// rect: all ones; hann: 0.5 - 0.5 cos(2 pi k / (len - 1)), with hann(1) = {1}.
/// Throws InvalidArgument for length 0.
std::vector<double> window(WindowKind kind, std::size_t length);

/// Integer zero-padding factors; the FFT length is the axis length times the factor.
struct FftPadding {
  std::uint32_t range = 1;
  std::uint32_t doppler = 1;
};

/// Magnitudes are Doppler rows by range columns.
struct RangeDopplerMap {
  Raster<double> magnitudes;
  std::vector<double> range_axis;     ///< m, one per column
  std::vector<double> velocity_axis;  ///< m/s, one per row, zero at row rows/2
  std::uint32_t cpi_index = 0;
  double time = 0.0;
};

/// Centre of range bin k for an FFT of `fft_length` points (default Ns):
/// k c Fs / (2 mu fft_length).
double bin_to_range(const RadarConfig& cfg, double k);
double bin_to_range(const RadarConfig& cfg, double k, std::size_t fft_length);

/// Velocity of signed Doppler bin p (-Nd/2 .. Nd/2 - 1) for an FFT of
/// `fft_length` points (default L): p lambda / (2 fft_length M Tb).
double bin_to_velocity(const RadarConfig& cfg, double p);
double bin_to_velocity(const RadarConfig& cfg, double p, std::size_t fft_length);

/// Complex range-Doppler spectrum of every virtual channel, indexed
/// [channel][Doppler row][range bin] with the Doppler axis already shifted.
struct RangeDopplerSpectra {
  std::size_t channels = 0;
  std::size_t doppler_bins = 0;
  std::size_t range_bins = 0;
  std::vector<std::complex<double>> data;

  const std::complex<double>& operator()(std::size_t v, std::size_t row, std::size_t k) const {
    return data[(v * doppler_bins + row) * range_bins + k];
  }
};

/// Throws DimensionError unless the windows have Ns and L coefficients.
RangeDopplerSpectra range_doppler_spectra(const RadarCube& cube, std::span<const double> range_window,
                                          std::span<const double> doppler_window, FftPadding padding = {});

/// Per-channel spectra followed by a sum of magnitudes over channels.
RangeDopplerMap range_doppler(const RadarCube& cube, std::span<const double> range_window,
                              std::span<const double> doppler_window, FftPadding padding = {});

struct AngleSpectrum {
  std::vector<double> magnitudes;  ///< M N bins in FFT order (bin 0 = broadside)
  int peak_bin = 0;                ///< signed, -MN/2 .. MN/2 - 1
  double sin_theta = 0.0;
  double theta = 0.0;  ///< rad
};

/// Angle FFT of one range-Doppler cell. `range_bin` indexes the unpadded
/// range FFT and `doppler_bin` is the signed Doppler bin. Windows default to
/// rect when empty. Throws OutOfRangeError for bad bins and
/// NoPhysicalAngleError when the peak maps to |sin theta| > 1.
AngleSpectrum angle_spectrum(const RadarCube& cube, std::size_t range_bin, int doppler_bin,
                             std::span<const double> range_window = {}, std::span<const double> doppler_window = {});

struct TrackEntry {
  double time = 0.0;      ///< s
  double velocity = 0.0;  ///< m/s at the map's global maximum; NaN for a gap
  double power = 0.0;     ///< value of the non-coherent map at the maximum
  bool gap = false;       ///< the map was identically zero
};

struct DopplerTrack {
  std::vector<TrackEntry> entries;
};

/// One entry per map, stamped with the map's time (the time of the frame that
/// drove the CPI). Throws EmptyInputError for no maps and InvalidArgument when
/// times are not strictly increasing.
DopplerTrack extract_track(std::span<const RangeDopplerMap> maps);

// --- exports -----------------------------------------------------------------

/// Header row holds the range axis; each following row is one velocity bin.
void write_range_doppler_csv(const RangeDopplerMap& map, const std::filesystem::path& path);

/// 8-bit binary PGM of 20 log10(|.| / max) clipped to `dynamic_range_db`;
/// the top image row is the most positive velocity.
void write_range_doppler_pgm(const RangeDopplerMap& map, const std::filesystem::path& path,
                             double dynamic_range_db = 60.0);

/// CSV with header "time_s,velocity_mps,power"; gaps are written as "nan,0".
void write_track_csv(const DopplerTrack& track, const std::filesystem::path& path);
DopplerTrack read_track_csv(const std::filesystem::path& path);

}  // namespace fmcwsim
