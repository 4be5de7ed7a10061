#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <fmt/format.h>
#include <iterator>
#include <vector>

#include "wavenhance/audio.hpp"
#include "wavenhance/error.hpp"

namespace wavenhance {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

struct FormatChunk {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const FormatChunk& fmt) {
  if (fmt.tag == kFormatFloat) {
    const std::uint32_t bits = le_u32(p);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return static_cast<double>(f);
  }
  // Symmetric scaling by the largest positive code, matching the writer; the
  // most negative code maps slightly below -1.
  switch (fmt.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 127.0;
    case 16:
      return static_cast<std::int16_t>(le_u16(p)) / 32767.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388607.0;
    }
    case 32:
      return static_cast<std::int32_t>(le_u32(p)) / 2147483647.0;
  }
  return 0.0;
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}' for reading", path.string()));
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat,
                fmt::format("'{}' is not a RIFF/WAVE file", path.string()));
  }

  FormatChunk fmt_chunk;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* header = bytes.data() + pos;
    const std::size_t chunk_size = le_u32(header + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(chunk_size, bytes.size() - body);
    if (std::memcmp(header, "fmt ", 4) == 0) {
      if (available < 16) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    fmt::format("'{}': truncated fmt chunk", path.string()));
      }
      const std::uint8_t* f = bytes.data() + body;
      fmt_chunk.tag = le_u16(f);
      fmt_chunk.channels = le_u16(f + 2);
      fmt_chunk.sample_rate = le_u32(f + 4);
      fmt_chunk.bits = le_u16(f + 14);
      if (fmt_chunk.tag == kFormatExtensible && available >= 26) {
        // First two bytes of the SubFormat GUID carry the actual format tag.
        fmt_chunk.tag = le_u16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(header, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = available;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }

  if (!have_fmt || data == nullptr) {
    throw Error(ErrorCode::kUnsupportedFormat,
                fmt::format("'{}': missing fmt or data chunk", path.string()));
  }
  const bool int_ok = fmt_chunk.tag == kFormatPcm &&
                      (fmt_chunk.bits == 8 || fmt_chunk.bits == 16 ||
                       fmt_chunk.bits == 24 || fmt_chunk.bits == 32);
  const bool float_ok = fmt_chunk.tag == kFormatFloat && fmt_chunk.bits == 32;
  if (!int_ok && !float_ok) {
    throw Error(ErrorCode::kUnsupportedFormat,
                fmt::format("'{}': unsupported codec (format tag {:#06x}, {} bits)",
                            path.string(), fmt_chunk.tag, fmt_chunk.bits));
  }
  if (fmt_chunk.channels == 0 || fmt_chunk.sample_rate == 0) {
    throw Error(ErrorCode::kUnsupportedFormat,
                fmt::format("'{}': invalid channel count or sample rate", path.string()));
  }

  const std::size_t sample_bytes = fmt_chunk.bits / 8;
  const std::size_t frame_bytes = sample_bytes * fmt_chunk.channels;
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) {
    throw Error(ErrorCode::kZeroFrames, fmt::format("'{}': zero frames", path.string()));
  }

  Samples samples(static_cast<Eigen::Index>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    const std::uint8_t* frame = data + i * frame_bytes;
    double sum = 0.0;
    for (std::size_t c = 0; c < fmt_chunk.channels; ++c) {
      sum += decode_sample(frame + c * sample_bytes, fmt_chunk);
    }
    samples[static_cast<Eigen::Index>(i)] = sum / fmt_chunk.channels;
  }
  if (!samples.allFinite()) {
    throw Error(ErrorCode::kUnsupportedFormat,
                fmt::format("'{}': non-finite float samples", path.string()));
  }
  return AudioBuffer(std::move(samples), static_cast<int>(fmt_chunk.sample_rate));
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  const auto frames = static_cast<std::uint32_t>(audio.size());
  const std::uint32_t data_size = frames * 2;
  const auto rate = static_cast<std::uint32_t>(audio.sample_rate_hz());

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  auto put_u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto put_u16 = [&out](std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto put_tag = [&out](const char* tag) { out.insert(out.end(), tag, tag + 4); };

  put_tag("RIFF");
  put_u32(36 + data_size);
  put_tag("WAVE");
  put_tag("fmt ");
  put_u32(16);
  put_u16(kFormatPcm);
  put_u16(1);
  put_u32(rate);
  put_u32(rate * 2);
  put_u16(2);
  put_u16(16);
  put_tag("data");
  put_u32(data_size);
  for (double s : audio.samples()) {
    const double clipped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
    put_u16(static_cast<std::uint16_t>(q));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}' for writing", path.string()));
  }
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw Error(ErrorCode::kIo, fmt::format("write to '{}' failed", path.string()));
  }
}

}  // namespace wavenhance
