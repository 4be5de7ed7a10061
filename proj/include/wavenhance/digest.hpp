#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "wavenhance/audio.hpp"

namespace wavenhance {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// SHA-256 over the sample rate (uint32 LE) followed by every sample as an
// IEEE-754 binary64 in little-endian byte order. Two buffers share a digest
// exactly when their rates and sample bit patterns agree.
std::string audio_digest(const AudioBuffer& audio);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws kMalformedResponse on invalid input.
std::string base64_decode(std::string_view text);

}  // namespace wavenhance
