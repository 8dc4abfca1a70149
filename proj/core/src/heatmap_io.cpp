#include "turbloc/heatmap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace turbloc {

namespace {

constexpr char kMagic[4] = {'T', 'M', 'B', 'T'};
constexpr std::size_t kHeaderBytes = 20;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_frame(const HeatmapFrame& frame, const std::filesystem::path& path) {
  if (frame.width() <= 0 || frame.height() <= 0) {
    throw FrameFormatError(FrameFormatError::Kind::Header, "cannot write an empty frame");
  }
  const std::size_t plane_size =
      static_cast<std::size_t>(frame.width()) * frame.height();
  std::vector<unsigned char> bytes;
  bytes.reserve(kHeaderBytes + kChannelCount * plane_size * 4);
  bytes.insert(bytes.end(), std::begin(kMagic), std::end(kMagic));
  put_u32(bytes, kFrameFormatVersion);
  put_u32(bytes, static_cast<std::uint32_t>(frame.width()));
  put_u32(bytes, static_cast<std::uint32_t>(frame.height()));
  put_u32(bytes, kChannelCount);
  for (int c = 0; c < kChannelCount; ++c) {
    for (float v : frame.channel(static_cast<Channel>(c)).data()) {
      put_u32(bytes, std::bit_cast<std::uint32_t>(v));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FrameFormatError(FrameFormatError::Kind::Io,
                           "cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw FrameFormatError(FrameFormatError::Kind::Io, "write failed: " + path.string());
  }
}

HeatmapFrame read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FrameFormatError(FrameFormatError::Kind::Io, "cannot open " + path.string());
  }
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < kHeaderBytes ||
      !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw FrameFormatError(FrameFormatError::Kind::Header, name + ": missing TMBT header");
  }
  const std::uint32_t version = get_u32(&bytes[4]);
  const std::uint32_t width = get_u32(&bytes[8]);
  const std::uint32_t height = get_u32(&bytes[12]);
  const std::uint32_t channels = get_u32(&bytes[16]);
  if (version != kFrameFormatVersion) {
    throw FrameFormatError(FrameFormatError::Kind::Header,
                           name + ": unsupported version " + std::to_string(version));
  }
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16)) {
    throw FrameFormatError(FrameFormatError::Kind::Header, name + ": bad frame size");
  }
  if (channels != static_cast<std::uint32_t>(kChannelCount)) {
    throw FrameFormatError(FrameFormatError::Kind::ChannelCount,
                           name + ": expected 7 channels, found " + std::to_string(channels));
  }
  const std::size_t plane_size = static_cast<std::size_t>(width) * height;
  const std::size_t expected = kHeaderBytes + kChannelCount * plane_size * 4;
  if (bytes.size() != expected) {
    throw FrameFormatError(FrameFormatError::Kind::Truncated,
                           name + ": payload is " + std::to_string(bytes.size()) +
                               " bytes, expected " + std::to_string(expected));
  }

  HeatmapFrame frame(static_cast<int>(width), static_cast<int>(height));
  const unsigned char* p = bytes.data() + kHeaderBytes;
  for (int c = 0; c < kChannelCount; ++c) {
    for (float& v : frame.channel(static_cast<Channel>(c)).data()) {
      v = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
  }
  return frame;
}

void write_plane_pgm(const HeatmapPlane& plane, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FrameFormatError(FrameFormatError::Kind::Io,
                           "cannot open " + path.string() + " for writing");
  }
  out << "P5\n" << plane.width() << ' ' << plane.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(plane.width()));
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < plane.width(); ++x) {
      const float v = std::clamp(plane.at(x, y), 0.0f, 1.0f);
      row[x] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
  if (!out) {
    throw FrameFormatError(FrameFormatError::Kind::Io, "write failed: " + path.string());
  }
}

}  // namespace turbloc
