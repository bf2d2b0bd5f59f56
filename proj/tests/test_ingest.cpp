#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "fmcwsim/errors.hpp"
#include "fmcwsim/ingest.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace fmcwsim {
namespace {

using testing::TempDir;

std::string encode(const FrameMaps& maps) {
  std::ostringstream out(std::ios::binary);
  write_frame(maps, out);
  return out.str();
}

FrameMaps decode(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_frame(in);
}

bool same_bits(const Raster<float>& a, const Raster<float>& b) {
  return a.same_shape(b) && std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

// Generator: arbitrary grids and float bit patterns, including infinities,
// subnormals, negative zero and NaN payloads.
FrameMaps random_frame(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> dim(1, 9);
  const CameraGrid grid{dim(rng), dim(rng), 0.1 + (rng() % 1000) * 1e-3, 0.1 + (rng() % 1000) * 1e-3};
  FrameMaps maps = FrameMaps::empty(grid, static_cast<std::uint32_t>(rng() % 100000), (rng() % 100000) * 1e-3);
  const float specials[] = {std::numeric_limits<float>::infinity(), -std::numeric_limits<float>::infinity(),
                            std::numeric_limits<float>::denorm_min(), -0.0f, 1e-40f,
                            std::numeric_limits<float>::max(), std::numeric_limits<float>::quiet_NaN()};
  for (Raster<float>* r : {&maps.range, &maps.amplitude, &maps.radial_velocity}) {
    for (float& x : r->values()) {
      x = rng() % 4 == 0 ? specials[rng() % std::size(specials)] : std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
    }
  }
  return maps;
}

TEST(Fmap, AllMissTwoByTwoPayload) {
  const FrameMaps maps = FrameMaps::empty(CameraGrid{2, 2, 1.0, 1.0}, 0, 0.0);
  const std::string bytes = encode(maps);
  EXPECT_EQ(bytes.size() - kFrameHeaderBytes, 48u);
  EXPECT_EQ(frame_payload_bytes(2, 2), 48u);
  const FrameMaps back = decode(bytes);
  for (float r : back.range.values()) EXPECT_EQ(r, kMissRange);
}

TEST(Fmap, PayloadSizeFor64By32) {
  EXPECT_EQ(frame_payload_bytes(64, 32), 24576u);
  const FrameMaps maps = FrameMaps::empty(CameraGrid{64, 32, 1.0, 0.5}, 3, 0.125);
  EXPECT_EQ(encode(maps).size(), kFrameHeaderBytes + 24576u);
}

TEST(Fmap, HeaderIsLittleEndian) {
  const FrameMaps maps = FrameMaps::empty(CameraGrid{3, 2, 1.0, 0.5}, 0x01020304, 0.0);
  const std::string b = encode(maps);
  EXPECT_EQ(b.substr(0, 4), "FMAP");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 1);  // version low byte
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 0);
  EXPECT_EQ(static_cast<unsigned char>(b[6]), 3);  // n_az
  EXPECT_EQ(static_cast<unsigned char>(b[10]), 2);  // n_el
  EXPECT_EQ(static_cast<unsigned char>(b[14]), 0x04);
  EXPECT_EQ(static_cast<unsigned char>(b[17]), 0x01);
}

TEST(Fmap, RoundTripPreservesBits) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const FrameMaps maps = random_frame(rng);
    const std::string bytes = encode(maps);
    const FrameMaps back = decode(bytes);
    EXPECT_EQ(back.frame_index, maps.frame_index);
    EXPECT_EQ(back.time, maps.time);
    EXPECT_EQ(back.grid, maps.grid);
    EXPECT_TRUE(same_bits(back.range, maps.range));
    EXPECT_TRUE(same_bits(back.amplitude, maps.amplitude));
    EXPECT_TRUE(same_bits(back.radial_velocity, maps.radial_velocity));
    EXPECT_EQ(encode(back), bytes);
  }
}

TEST(Fmap, RenderedWalkerFrameRoundTripsBytewise) {
  const Scene scene = make_walker_scene();
  const FrameMaps maps = render_frame(scene, make_grid(scene.sensor(), 32, 24), 40);
  const std::string bytes = encode(maps);
  const FrameMaps back = decode(bytes);
  EXPECT_TRUE(same_bits(back.range, maps.range));
  EXPECT_TRUE(same_bits(back.amplitude, maps.amplitude));
  EXPECT_TRUE(same_bits(back.radial_velocity, maps.radial_velocity));
  EXPECT_EQ(encode(back), bytes);
}

TEST(Fmap, BadMagicIsFormatError) {
  std::string bytes = encode(FrameMaps::empty(CameraGrid{2, 2, 1.0, 1.0}, 0, 0.0));
  bytes.replace(0, 4, "XMAP");
  EXPECT_THROW(decode(bytes), FormatError);
}

TEST(Fmap, TruncationIsCorruptionError) {
  const std::string bytes = encode(FrameMaps::empty(CameraGrid{4, 3, 1.0, 1.0}, 0, 0.0));
  EXPECT_THROW(decode(bytes.substr(0, bytes.size() - 4)), CorruptionError);
  EXPECT_THROW(decode(bytes.substr(0, bytes.size() - 1)), CorruptionError);
  EXPECT_THROW(decode(bytes.substr(0, 20)), CorruptionError);
  EXPECT_THROW(decode(bytes + "x"), CorruptionError);
}

TEST(Fmap, UnknownVersionIsVersionError) {
  std::string bytes = encode(FrameMaps::empty(CameraGrid{2, 2, 1.0, 1.0}, 0, 0.0));
  bytes[4] = 7;
  EXPECT_THROW(decode(bytes), VersionError);
}

TEST(Fmap, WriteRejectsInconsistentRasters) {
  FrameMaps maps = FrameMaps::empty(CameraGrid{2, 2, 1.0, 1.0}, 0, 0.0);
  maps.amplitude = Raster<float>(3, 2);
  std::ostringstream out;
  EXPECT_THROW(write_frame(maps, out), DimensionError);
}

TEST(Fmap, FileRoundTripAndPathInErrors) {
  TempDir dir("fmap");
  std::mt19937_64 rng(1);
  const FrameMaps maps = random_frame(rng);
  write_frame(maps, dir / "a.fmap");
  EXPECT_TRUE(same_bits(read_frame(dir / "a.fmap").range, maps.range));
  std::ofstream(dir / "bad.fmap", std::ios::binary) << "XMAPxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx";
  try {
    read_frame(dir / "bad.fmap");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.fmap"), std::string::npos);
  }
  EXPECT_THROW(read_frame(dir / "missing.fmap"), IoError);
}

class Sequence : public ::testing::Test {
 protected:
  TempDir dir{"seq"};
  CameraGrid grid{4, 3, 1.0, 0.5};

  std::string put(std::uint32_t index, const CameraGrid& g) {
    const std::string name = "frame_" + std::to_string(index) + ".fmap";
    write_frame(FrameMaps::empty(g, index, index * 0.1), dir / name);
    return name;
  }
};

TEST_F(Sequence, ManifestOrderDoesNotMatter) {
  const std::vector<std::string> names = {put(2, grid), put(0, grid), put(1, grid)};
  write_manifest(dir / "manifest.txt", names, {"written by a test"});
  const auto frames = read_sequence(dir / "manifest.txt");
  ASSERT_EQ(frames.size(), 3u);
  for (std::uint32_t i = 0; i < 3; ++i) EXPECT_EQ(frames[i].frame_index, i);
  EXPECT_EQ(read_sequence(dir.path()).size(), 3u);
}

TEST_F(Sequence, ManifestSkipsCommentsAndBlankLines) {
  put(0, grid);
  std::ofstream(dir / "manifest.txt") << "# header\n\n  frame_0.fmap  \n# trailer\n";
  EXPECT_EQ(read_manifest(dir / "manifest.txt").size(), 1u);
  EXPECT_EQ(read_sequence(dir / "manifest.txt").size(), 1u);
}

TEST_F(Sequence, MissingIndexIsGapError) {
  write_manifest(dir / "manifest.txt", {put(0, grid), put(2, grid)});
  EXPECT_THROW(read_sequence(dir / "manifest.txt"), GapError);
}

TEST_F(Sequence, MixedGridsAreInconsistent) {
  write_manifest(dir / "manifest.txt", {put(0, grid), put(1, CameraGrid{4, 4, 1.0, 0.5})});
  EXPECT_THROW(read_sequence(dir / "manifest.txt"), InconsistencyError);
}

TEST_F(Sequence, EmptyManifestIsEmptyInput) {
  write_manifest(dir / "manifest.txt", {}, {"nothing here"});
  EXPECT_THROW(read_sequence(dir / "manifest.txt"), EmptyInputError);
}

}  // namespace
}  // namespace fmcwsim
