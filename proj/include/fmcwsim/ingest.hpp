#pragma once

// FMAP frame-map files: the hand-off between renderers and signal synthesis.
// The byte layout is documented in FORMATS.md and is little-endian on every
// host.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fmcwsim/render.hpp"

namespace fmcwsim {

inline constexpr char kFrameMagic[4] = {'F', 'M', 'A', 'P'};
inline constexpr std::uint16_t kFrameFormatVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 42;

/// Payload size in bytes for an n_el x n_az frame.
constexpr std::size_t frame_payload_bytes(std::uint32_t n_az, std::uint32_t n_el) {
  return 3 * std::size_t{n_el} * n_az * sizeof(float);
}

/// Returns the number of bytes written. Throws DimensionError when the rasters
/// disagree with the grid, IoError on stream failure.
std::size_t write_frame(const FrameMaps& maps, std::ostream& out);

/// Writes to a sibling temporary file and renames it over `path`.
std::size_t write_frame(const FrameMaps& maps, const std::filesystem::path& path);

/// Throws FormatError (magic), VersionError, CorruptionError (payload length).
FrameMaps read_frame(std::istream& in);
FrameMaps read_frame(const std::filesystem::path& path);

/// Plain-text manifest: one file name per line, relative to the manifest's
/// directory. Blank lines and lines starting with '#' are ignored.
void write_manifest(const std::filesystem::path& path, const std::vector<std::string>& entries,
                    const std::vector<std::string>& comments = {});
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& path);

/// Loads every frame listed in a manifest, or every *.fmap file when given a
/// directory. Result is sorted by frame_index and must cover 0..K-1 without
/// gaps (GapError) on one grid (InconsistencyError).
std::vector<FrameMaps> read_sequence(const std::filesystem::path& directory_or_manifest);

/// Writes bytes to `path` through a temporary sibling and an atomic rename.
void write_file_atomically(const std::filesystem::path& path, const std::string& bytes);

}  // namespace fmcwsim
