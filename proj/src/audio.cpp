#include "wavenhance/audio.hpp"

#include <cmath>
#include <fmt/format.h>

#include "wavenhance/error.hpp"

namespace wavenhance {

AudioBuffer::AudioBuffer(Samples samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("sample rate must be positive, got {}", sample_rate_hz_));
  }
  if (!samples_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "audio samples must be finite");
  }
}

namespace {

void require_nonempty(const AudioBuffer& audio, const char* op) {
  if (audio.empty()) {
    throw Error(ErrorCode::kEmptyInput, fmt::format("{}: empty audio buffer", op));
  }
}

}  // namespace

double energy(const AudioBuffer& audio) {
  double sum = 0.0;
  for (double s : audio.samples()) sum += s * s;
  return sum;
}

SignalStats signal_stats(const AudioBuffer& audio) {
  require_nonempty(audio, "signal_stats");
  SignalStats stats;
  stats.energy = energy(audio);
  stats.rms = std::sqrt(stats.energy / static_cast<double>(audio.size()));
  stats.peak = audio.samples().abs().maxCoeff();
  return stats;
}

AudioBuffer normalize_rms(const AudioBuffer& audio, double target_rms) {
  if (!(target_rms > 0.0) || !std::isfinite(target_rms)) {
    throw Error(ErrorCode::kInvalidArgument, "normalize_rms: target must be positive");
  }
  const SignalStats stats = signal_stats(audio);
  if (stats.rms == 0.0) {
    throw Error(ErrorCode::kEmptyInput, "normalize_rms: all-zero input");
  }
  return audio.with_samples(audio.samples() * (target_rms / stats.rms));
}

AudioBuffer normalize_energy(const AudioBuffer& audio, double target_energy) {
  if (!(target_energy > 0.0) || !std::isfinite(target_energy)) {
    throw Error(ErrorCode::kInvalidArgument, "normalize_energy: target must be positive");
  }
  require_nonempty(audio, "normalize_energy");
  const double current = energy(audio);
  if (current == 0.0) {
    throw Error(ErrorCode::kEmptyInput, "normalize_energy: all-zero input");
  }
  return audio.with_samples(audio.samples() * std::sqrt(target_energy / current));
}

AudioBuffer mix_at_nsr(const AudioBuffer& speech, const AudioBuffer& noise,
                       double nsr) {
  if (!(nsr >= 0.0) || !std::isfinite(nsr)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("mix_at_nsr: nsr must be non-negative, got {}", nsr));
  }
  require_nonempty(speech, "mix_at_nsr");
  if (speech.sample_rate_hz() != noise.sample_rate_hz()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("mix_at_nsr: sample-rate mismatch ({} Hz speech vs {} Hz noise)",
                            speech.sample_rate_hz(), noise.sample_rate_hz()));
  }
  if (nsr == 0.0) return speech;
  require_nonempty(noise, "mix_at_nsr");

  const Eigen::Index n = speech.size();
  const Eigen::Index m = noise.size();
  Samples out = speech.samples();
  for (Eigen::Index start = 0; start < n; start += m) {
    const Eigen::Index len = std::min(m, n - start);
    out.segment(start, len) += nsr * noise.samples().head(len);
  }
  return speech.with_samples(std::move(out));
}

}  // namespace wavenhance
