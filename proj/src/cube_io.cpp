#include <fstream>

#include "byte_io.hpp"
#include "fmcwsim/errors.hpp"
#include "fmcwsim/ingest.hpp"
#include "fmcwsim/signal.hpp"

namespace fmcwsim {
namespace {

constexpr std::uint32_t kFlagIdealTdm = 1u << 0;
constexpr std::uint32_t kFlagExplicitSpacing = 1u << 1;

std::string encode_cube(const RadarCube& cube) {
  const RadarConfig& cfg = cube.config();
  detail::ByteWriter w;
  w.reserve(kCubeHeaderBytes + cube.values().size() * 8);
  w.put_bytes({kCubeMagic, 4});
  w.put(kCubeFormatVersion);
  w.put(cfg.n_tx);
  w.put(cfg.n_rx);
  w.put(cfg.n_blocks);
  w.put(cfg.samples_per_chirp);
  w.put(cube.cpi_index());
  std::uint32_t flags = 0;
  if (cfg.ideal_tdm) flags |= kFlagIdealTdm;
  if (cfg.rx_spacing) flags |= kFlagExplicitSpacing;
  w.put(flags);
  w.put(cube.time());
  w.put(cfg.carrier);
  w.put(cfg.bandwidth);
  w.put(cfg.chirp_duration);
  w.put(cfg.sample_rate);
  w.put(cfg.spacing());
  for (const auto& x : cube.values()) {
    w.put(static_cast<float>(x.real()));
    w.put(static_cast<float>(x.imag()));
  }
  return w.take();
}

RadarCube decode_cube(std::string_view bytes) {
  if (bytes.size() < 4 || !std::equal(kCubeMagic, kCubeMagic + 4, bytes.begin())) {
    throw FormatError("not a radar-cube file (bad magic)");
  }
  if (bytes.size() < kCubeHeaderBytes) throw CorruptionError("radar-cube header truncated");
  detail::ByteReader r(bytes);
  r.get_bytes(4);
  const auto version = r.get<std::uint16_t>();
  if (version != kCubeFormatVersion) throw VersionError("unsupported radar-cube version " + std::to_string(version));

  RadarConfig cfg;
  cfg.n_tx = r.get<std::uint32_t>();
  cfg.n_rx = r.get<std::uint32_t>();
  cfg.n_blocks = r.get<std::uint32_t>();
  cfg.samples_per_chirp = r.get<std::uint32_t>();
  const auto cpi_index = r.get<std::uint32_t>();
  const auto flags = r.get<std::uint32_t>();
  const auto time = r.get<double>();
  cfg.carrier = r.get<double>();
  cfg.bandwidth = r.get<double>();
  cfg.chirp_duration = r.get<double>();
  cfg.sample_rate = r.get<double>();
  const auto spacing = r.get<double>();
  cfg.ideal_tdm = (flags & kFlagIdealTdm) != 0;
  if (flags & kFlagExplicitSpacing) cfg.rx_spacing = spacing;

  const std::size_t count = std::size_t{cfg.n_tx} * cfg.n_rx * cfg.n_blocks * cfg.samples_per_chirp;
  if (r.remaining() != count * 8) {
    throw CorruptionError("radar-cube payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
                          std::to_string(count * 8));
  }
  try {
    validate(cfg);
  } catch (const InvalidArgument& e) {
    throw CorruptionError(std::string("radar-cube header invalid: ") + e.what());
  }
  RadarCube cube(cfg, cpi_index, time);
  for (auto& x : cube.values()) {
    const float re = r.get<float>();
    const float im = r.get<float>();
    x = {re, im};
  }
  return cube;
}

}  // namespace

std::size_t write_cube(const RadarCube& cube, std::ostream& out) {
  const std::string bytes = encode_cube(cube);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("radar-cube write failed");
  return bytes.size();
}

std::size_t write_cube(const RadarCube& cube, const std::filesystem::path& path) {
  const std::string bytes = encode_cube(cube);
  write_file_atomically(path, bytes);
  return bytes.size();
}

RadarCube read_cube(std::istream& in) { return decode_cube(detail::read_all(in)); }

RadarCube read_cube(const std::filesystem::path& path) {
  try {
    return decode_cube(detail::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const VersionError& e) {
    throw VersionError(path.string() + ": " + e.what());
  } catch (const CorruptionError& e) {
    throw CorruptionError(path.string() + ": " + e.what());
  }
}

}  // namespace fmcwsim
