#include "wavenhance/wavelet.hpp"

#include <fmt/format.h>

namespace wavenhance {

std::string band_name(int level, std::size_t index) {
  if (index == 0) return fmt::format("cA{}", level);
  return fmt::format("cD{}", level + 1 - static_cast<int>(index));
}

std::vector<std::pair<double, double>> band_edges_hz(int level, int sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  std::vector<std::pair<double, double>> edges;
  edges.emplace_back(0.0, nyquist / (1 << level));
  for (int k = level; k >= 1; --k) {
    edges.emplace_back(nyquist / (1 << k), nyquist / (1 << (k - 1)));
  }
  return edges;
}

SubbandSet<double> wavedec(const AudioBuffer& audio, int level, ExtensionMode mode) {
  return decompose(audio.samples(), level, mode, audio.sample_rate_hz());
}

AudioBuffer waverec(const SubbandSet<double>& subbands) {
  if (subbands.sample_rate_hz <= 0) {
    throw Error(ErrorCode::kInconsistentLengths, "waverec: subband set has no sample rate");
  }
  return AudioBuffer(reconstruct(subbands), subbands.sample_rate_hz);
}

}  // namespace wavenhance
