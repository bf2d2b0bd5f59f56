#include "fmcwsim/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "byte_io.hpp"
#include "fmcwsim/errors.hpp"

namespace fmcwsim {

namespace detail {

std::string read_all(std::istream& in) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("stream read failed");
  return bytes;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_all(in);
}

}  // namespace detail

namespace {

std::string encode_frame(const FrameMaps& maps) {
  if (!maps.consistent()) throw DimensionError("frame rasters do not match the camera grid");
  detail::ByteWriter w;
  w.reserve(kFrameHeaderBytes + frame_payload_bytes(maps.grid.n_az, maps.grid.n_el));
  w.put_bytes({kFrameMagic, 4});
  w.put(kFrameFormatVersion);
  w.put(maps.grid.n_az);
  w.put(maps.grid.n_el);
  w.put(maps.frame_index);
  w.put(maps.time);
  w.put(maps.grid.fov_az);
  w.put(maps.grid.fov_el);
  for (const Raster<float>* layer : {&maps.range, &maps.amplitude, &maps.radial_velocity}) {
    for (float v : layer->values()) w.put(v);
  }
  return w.take();
}

FrameMaps decode_frame(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (bytes.size() < 4 || !std::equal(kFrameMagic, kFrameMagic + 4, bytes.begin())) {
    throw FormatError("not a frame-map file (bad magic)");
  }
  if (bytes.size() < kFrameHeaderBytes) throw CorruptionError("frame-map header truncated");
  r.get_bytes(4);
  const auto version = r.get<std::uint16_t>();
  if (version != kFrameFormatVersion) {
    throw VersionError("unsupported frame-map version " + std::to_string(version));
  }
  CameraGrid grid;
  grid.n_az = r.get<std::uint32_t>();
  grid.n_el = r.get<std::uint32_t>();
  const auto frame_index = r.get<std::uint32_t>();
  const auto time = r.get<double>();
  grid.fov_az = r.get<double>();
  grid.fov_el = r.get<double>();
  const std::size_t expected = frame_payload_bytes(grid.n_az, grid.n_el);
  if (r.remaining() != expected) {
    throw CorruptionError("frame-map payload is " + std::to_string(r.remaining()) + " bytes, header declares " +
                          std::to_string(expected));
  }
  FrameMaps maps = FrameMaps::empty(grid, frame_index, time);
  for (Raster<float>* layer : {&maps.range, &maps.amplitude, &maps.radial_velocity}) {
    for (float& v : layer->values()) v = r.get<float>();
  }
  return maps;
}

}  // namespace

void write_file_atomically(const std::filesystem::path& path, const std::string& bytes) {
  static std::atomic<unsigned> counter{0};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "_" +
         std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

std::size_t write_frame(const FrameMaps& maps, std::ostream& out) {
  const std::string bytes = encode_frame(maps);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("frame-map write failed");
  return bytes.size();
}

std::size_t write_frame(const FrameMaps& maps, const std::filesystem::path& path) {
  const std::string bytes = encode_frame(maps);
  write_file_atomically(path, bytes);
  return bytes.size();
}

FrameMaps read_frame(std::istream& in) { return decode_frame(detail::read_all(in)); }

FrameMaps read_frame(const std::filesystem::path& path) {
  try {
    return decode_frame(detail::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const VersionError& e) {
    throw VersionError(path.string() + ": " + e.what());
  } catch (const CorruptionError& e) {
    throw CorruptionError(path.string() + ": " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const std::vector<std::string>& entries,
                    const std::vector<std::string>& comments) {
  std::ostringstream text;
  for (const auto& c : comments) text << "# " << c << '\n';
  for (const auto& e : entries) text << e << '\n';
  write_file_atomically(path, text.str());
}

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::vector<std::filesystem::path> files;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    files.push_back(path.parent_path() / line.substr(first));
  }
  return files;
}

std::vector<FrameMaps> read_sequence(const std::filesystem::path& directory_or_manifest) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(directory_or_manifest)) {
    for (const auto& entry : std::filesystem::directory_iterator(directory_or_manifest)) {
      if (entry.is_regular_file() && entry.path().extension() == ".fmap") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files = read_manifest(directory_or_manifest);
  }
  if (files.empty()) throw EmptyInputError("no frame-map files in " + directory_or_manifest.string());

  std::vector<FrameMaps> frames;
  frames.reserve(files.size());
  for (const auto& file : files) frames.push_back(read_frame(file));
  std::stable_sort(frames.begin(), frames.end(),
                   [](const FrameMaps& a, const FrameMaps& b) { return a.frame_index < b.frame_index; });

  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].frame_index != i) {
      throw GapError("frame sequence " + directory_or_manifest.string() + " is missing frame index " +
                     std::to_string(i));
    }
    if (!(frames[i].grid == frames.front().grid)) {
      throw InconsistencyError("frame " + std::to_string(i) + " grid differs from frame 0");
    }
  }
  return frames;
}

}  // namespace fmcwsim
