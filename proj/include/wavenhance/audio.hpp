#pragma once

#include <Eigen/Core>
#include <filesystem>

namespace wavenhance {

using Samples = Eigen::ArrayXd;

// Mono signal at a fixed sample rate. Samples are nominally in [-1, 1] and
// always finite; the constructor rejects NaN/Inf and non-positive rates.
class AudioBuffer {
 public:
  AudioBuffer(Samples samples, int sample_rate_hz);

  const Samples& samples() const noexcept { return samples_; }
  int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  Eigen::Index size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.size() == 0; }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

  // Same rate, new content.
  AudioBuffer with_samples(Samples samples) const {
    return AudioBuffer(std::move(samples), sample_rate_hz_);
  }

 private:
  Samples samples_;
  int sample_rate_hz_;
};

struct SignalStats {
  double rms = 0.0;
  double energy = 0.0;  // sum of squares
  double peak = 0.0;    // max |sample|
};

SignalStats signal_stats(const AudioBuffer& audio);

// Sum of squared samples in index order.
double energy(const AudioBuffer& audio);

AudioBuffer normalize_rms(const AudioBuffer& audio, double target_rms);
AudioBuffer normalize_energy(const AudioBuffer& audio, double target_energy);

// output[i] = speech[i] + nsr * noise[i mod len(noise)]. The noise is tiled
// or truncated to the speech length. NSR is an amplitude multiplier applied
// to noise that the caller has already rms-matched to the speech.
AudioBuffer mix_at_nsr(const AudioBuffer& speech, const AudioBuffer& noise,
                       double nsr);

// RIFF/WAVE input: PCM 8/16/24/32-bit integer and 32-bit IEEE float,
// including WAVE_FORMAT_EXTENSIBLE wrappers of those. Channels are averaged
// to mono and integers are divided by the largest positive code (2^(bits-1) - 1).
AudioBuffer read_wav(const std::filesystem::path& path);

// 16-bit PCM mono. Samples are clipped to [-1, 1] and scaled by 32767
// (symmetric), rounding to nearest.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace wavenhance
