#include "fmcwsim/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "fft.hpp"
#include "fmcwsim/errors.hpp"
#include "fmcwsim/ingest.hpp"
#include "fmcwsim/parallel.hpp"

namespace fmcwsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_windows(const RadarCube& cube, std::span<const double> range_window,
                   std::span<const double> doppler_window) {
  if (range_window.size() != cube.samples()) {
    throw DimensionError("range window has " + std::to_string(range_window.size()) + " coefficients, cube has " +
                         std::to_string(cube.samples()) + " samples per chirp");
  }
  if (doppler_window.size() != cube.blocks()) {
    throw DimensionError("Doppler window has " + std::to_string(doppler_window.size()) + " coefficients, cube has " +
                         std::to_string(cube.blocks()) + " blocks");
  }
}

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

}  // namespace

std::vector<double> window(WindowKind kind, std::size_t length) {
  if (length == 0) throw InvalidArgument("window length must be >= 1");
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::hann && length > 1) {
    const double denom = static_cast<double>(length - 1);
    for (std::size_t k = 0; k < length; ++k) w[k] = 0.5 - 0.5 * std::cos(kTwoPi * k / denom);
  }
  return w;
}

double bin_to_range(const RadarConfig& cfg, double k) { return bin_to_range(cfg, k, cfg.samples_per_chirp); }

double bin_to_range(const RadarConfig& cfg, double k, std::size_t fft_length) {
  return k * kSpeedOfLight * cfg.sample_rate / (2.0 * cfg.slope() * static_cast<double>(fft_length));
}

double bin_to_velocity(const RadarConfig& cfg, double p) { return bin_to_velocity(cfg, p, cfg.n_blocks); }

double bin_to_velocity(const RadarConfig& cfg, double p, std::size_t fft_length) {
  return p * cfg.wavelength() / (2.0 * static_cast<double>(fft_length) * cfg.block_duration());
}

RangeDopplerSpectra range_doppler_spectra(const RadarCube& cube, std::span<const double> range_window,
                                          std::span<const double> doppler_window, FftPadding padding) {
  check_windows(cube, range_window, doppler_window);
  if (padding.range < 1 || padding.doppler < 1) throw InvalidArgument("padding factors must be >= 1");

  RangeDopplerSpectra out;
  out.channels = cube.channels();
  out.range_bins = cube.samples() * padding.range;
  out.doppler_bins = cube.blocks() * padding.doppler;
  out.data.assign(out.channels * out.doppler_bins * out.range_bins, {});
  const std::size_t nr = out.range_bins;
  const std::size_t nd = out.doppler_bins;
  const std::size_t half = nd / 2;

  parallel_for(out.channels, [&](std::size_t v) {
    // Range FFT of every chirp into a block-major scratch plane.
    std::vector<std::complex<double>> plane(nd * nr);
    for (std::size_t l = 0; l < cube.blocks(); ++l) {
      const auto chirp = cube.chirp(v, l);
      auto row = std::span(plane).subspan(l * nr, nr);
      for (std::size_t s = 0; s < chirp.size(); ++s) row[s] = chirp[s] * range_window[s];
      detail::fft_inplace(row, detail::FftSign::forward);
    }
    // Slow-time FFT per range bin, written out already shifted.
    std::vector<std::complex<double>> column(nd);
    for (std::size_t k = 0; k < nr; ++k) {
      std::fill(column.begin(), column.end(), std::complex<double>{});
      for (std::size_t l = 0; l < cube.blocks(); ++l) column[l] = plane[l * nr + k] * doppler_window[l];
      detail::fft_inplace(column, detail::FftSign::backward);
      for (std::size_t row = 0; row < nd; ++row) {
        const std::size_t bin = (row + nd - half) % nd;
        out.data[(v * nd + row) * nr + k] = column[bin];
      }
    }
  });
  return out;
}

RangeDopplerMap range_doppler(const RadarCube& cube, std::span<const double> range_window,
                              std::span<const double> doppler_window, FftPadding padding) {
  const RangeDopplerSpectra spectra = range_doppler_spectra(cube, range_window, doppler_window, padding);
  RangeDopplerMap map;
  map.cpi_index = cube.cpi_index();
  map.time = cube.time();
  map.magnitudes = Raster<double>(spectra.doppler_bins, spectra.range_bins, 0.0);
  for (std::size_t v = 0; v < spectra.channels; ++v) {
    for (std::size_t row = 0; row < spectra.doppler_bins; ++row) {
      for (std::size_t k = 0; k < spectra.range_bins; ++k) map.magnitudes(row, k) += std::abs(spectra(v, row, k));
    }
  }
  const RadarConfig& cfg = cube.config();
  map.range_axis.resize(spectra.range_bins);
  for (std::size_t k = 0; k < spectra.range_bins; ++k) {
    map.range_axis[k] = bin_to_range(cfg, static_cast<double>(k), spectra.range_bins);
  }
  map.velocity_axis.resize(spectra.doppler_bins);
  const auto half = static_cast<double>(spectra.doppler_bins / 2);
  for (std::size_t row = 0; row < spectra.doppler_bins; ++row) {
    map.velocity_axis[row] = bin_to_velocity(cfg, static_cast<double>(row) - half, spectra.doppler_bins);
  }
  return map;
}

AngleSpectrum angle_spectrum(const RadarCube& cube, std::size_t range_bin, int doppler_bin,
                             std::span<const double> range_window, std::span<const double> doppler_window) {
  const std::size_t ns = cube.samples();
  const std::size_t nb = cube.blocks();
  const auto half = static_cast<int>(nb / 2);
  if (range_bin >= ns) throw OutOfRangeError("range bin out of range");
  if (doppler_bin < -half || doppler_bin >= static_cast<int>(nb) - half) {
    throw OutOfRangeError("Doppler bin out of range");
  }
  const std::vector<double> rect_r(range_window.empty() ? ns : 0, 1.0);
  const std::vector<double> rect_d(doppler_window.empty() ? nb : 0, 1.0);
  if (range_window.empty()) range_window = rect_r;
  if (doppler_window.empty()) doppler_window = rect_d;
  check_windows(cube, range_window, doppler_window);

  std::vector<std::complex<double>> range_twiddle(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const double cycles = static_cast<double>((range_bin * s) % ns) / static_cast<double>(ns);
    range_twiddle[s] = range_window[s] * std::polar(1.0, -kTwoPi * cycles);
  }
  const std::size_t p_mod = static_cast<std::size_t>((doppler_bin % static_cast<int>(nb) + static_cast<int>(nb))) % nb;
  std::vector<std::complex<double>> doppler_twiddle(nb);
  for (std::size_t l = 0; l < nb; ++l) {
    const double cycles = static_cast<double>((p_mod * l) % nb) / static_cast<double>(nb);
    doppler_twiddle[l] = doppler_window[l] * std::polar(1.0, kTwoPi * cycles);
  }

  const std::size_t nv = cube.channels();
  std::vector<std::complex<double>> cell(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    std::complex<double> acc{};
    for (std::size_t l = 0; l < nb; ++l) {
      const auto chirp = cube.chirp(v, l);
      std::complex<double> range_sum{};
      for (std::size_t s = 0; s < ns; ++s) range_sum += chirp[s] * range_twiddle[s];
      acc += range_sum * doppler_twiddle[l];
    }
    cell[v] = acc;
  }
  detail::fft_inplace(cell, detail::FftSign::forward);

  AngleSpectrum result;
  result.magnitudes.resize(nv);
  for (std::size_t u = 0; u < nv; ++u) result.magnitudes[u] = std::abs(cell[u]);
  const auto peak = static_cast<int>(std::distance(
      result.magnitudes.begin(), std::max_element(result.magnitudes.begin(), result.magnitudes.end())));
  const int n = static_cast<int>(nv);
  result.peak_bin = peak >= (n + 1) / 2 ? peak - n : peak;

  const RadarConfig& cfg = cube.config();
  result.sin_theta = cfg.wavelength() * result.peak_bin / (cfg.spacing() * n);
  if (std::abs(result.sin_theta) > 1.0) {
    throw NoPhysicalAngleError("angle bin " + std::to_string(result.peak_bin) + " maps to sin(theta) = " +
                               format_double(result.sin_theta));
  }
  result.theta = std::asin(result.sin_theta);
  return result;
}

DopplerTrack extract_track(std::span<const RangeDopplerMap> maps) {
  if (maps.empty()) throw EmptyInputError("extract_track needs at least one map");
  DopplerTrack track;
  track.entries.reserve(maps.size());
  for (const auto& map : maps) {
    if (!track.entries.empty() && !(map.time > track.entries.back().time)) {
      throw InvalidArgument("map times must be strictly increasing");
    }
    const auto values = map.magnitudes.values();
    TrackEntry entry;
    entry.time = map.time;
    const auto it = std::max_element(values.begin(), values.end());
    if (it == values.end() || !(*it > 0.0)) {
      entry.gap = true;
      entry.velocity = std::numeric_limits<double>::quiet_NaN();
      entry.power = 0.0;
    } else {
      const auto index = static_cast<std::size_t>(std::distance(values.begin(), it));
      entry.velocity = map.velocity_axis.at(index / map.magnitudes.cols());
      entry.power = *it;
    }
    track.entries.push_back(entry);
  }
  return track;
}

void write_range_doppler_csv(const RangeDopplerMap& map, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "velocity_mps\\range_m";
  for (double r : map.range_axis) out << ',' << format_double(r);
  out << '\n';
  for (std::size_t row = 0; row < map.magnitudes.rows(); ++row) {
    out << format_double(map.velocity_axis.at(row));
    for (double v : map.magnitudes.row(row)) out << ',' << format_double(v);
    out << '\n';
  }
  write_file_atomically(path, out.str());
}

void write_range_doppler_pgm(const RangeDopplerMap& map, const std::filesystem::path& path,
                             double dynamic_range_db) {
  const std::size_t rows = map.magnitudes.rows();
  const std::size_t cols = map.magnitudes.cols();
  const auto values = map.magnitudes.values();
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  std::string image = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  image.reserve(image.size() + rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t row = rows - 1 - i;
    for (double v : map.magnitudes.row(row)) {
      double level = 0.0;
      if (peak > 0.0 && v > 0.0) {
        const double db = 20.0 * std::log10(v / peak);
        level = std::clamp(1.0 + db / dynamic_range_db, 0.0, 1.0);
      }
      image.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(level * 255.0))));
    }
  }
  write_file_atomically(path, image);
}

void write_track_csv(const DopplerTrack& track, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "time_s,velocity_mps,power\n";
  for (const auto& e : track.entries) {
    out << format_double(e.time) << ',' << (e.gap ? std::string("nan") : format_double(e.velocity)) << ','
        << format_double(e.gap ? 0.0 : e.power) << '\n';
  }
  write_file_atomically(path, out.str());
}

DopplerTrack read_track_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open track " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("time_s,velocity_mps,power", 0) != 0) {
    throw FormatError(path.string() + ": missing track header");
  }
  DopplerTrack track;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string time_text, velocity_text, power_text;
    if (!std::getline(fields, time_text, ',') || !std::getline(fields, velocity_text, ',') ||
        !std::getline(fields, power_text)) {
      throw FormatError(path.string() + ":" + std::to_string(line_number) + ": expected 3 fields");
    }
    try {
      TrackEntry e;
      e.time = std::stod(time_text);
      e.velocity = std::stod(velocity_text);
      e.power = std::stod(power_text);
      e.gap = std::isnan(e.velocity);
      track.entries.push_back(e);
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ":" + std::to_string(line_number) + ": malformed number");
    }
  }
  return track;
}

}  // namespace fmcwsim
