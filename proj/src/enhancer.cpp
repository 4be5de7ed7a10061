#include "wavenhance/enhancer.hpp"

#include <cmath>
#include <fmt/format.h>

namespace wavenhance {

GainVector::GainVector(Eigen::ArrayXd gains) : gains_(std::move(gains)) {
  if (gains_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "gain vector needs at least two bands");
  }
  if (!gains_.allFinite() || (gains_ < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "gains must be finite and non-negative");
  }
}

GainVector::GainVector(std::initializer_list<double> gains)
    : GainVector(Eigen::Map<const Eigen::ArrayXd>(gains.begin(),
                                                  static_cast<Eigen::Index>(gains.size()))) {}

GainVector GainVector::with(int band, double gain) const {
  Eigen::ArrayXd g = gains_;
  g[band] = gain;
  return GainVector(std::move(g));
}

std::string to_string(const GainVector& gains) {
  std::string out;
  for (int b = 0; b < gains.size(); ++b) {
    if (b) out += ' ';
    out += fmt::format("{:.6g}", gains[b]);
  }
  return out;
}

void LimiterConfig::validate() const {
  if (!(knee_start > 0.0 && knee_start < peak_threshold && peak_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("limiter requires 0 < knee ({}) < threshold ({}) <= 1", knee_start,
                            peak_threshold));
  }
}

double compress_sample(double sample, const LimiterConfig& config) {
  const double magnitude = std::abs(sample);
  if (magnitude <= config.knee_start) return sample;
  const double range = config.peak_threshold - config.knee_start;
  const double shaped = config.knee_start + range * std::tanh((magnitude - config.knee_start) / range);
  return std::copysign(std::min(shaped, config.peak_threshold), sample);
}

AudioBuffer compress_peaks(const AudioBuffer& audio, const LimiterConfig& config) {
  config.validate();
  return audio.with_samples(
      audio.samples().unaryExpr([&config](double s) { return compress_sample(s, config); }));
}

EnhanceResult wavelet_enhance(const AudioBuffer& audio, const GainVector& gains,
                              const LimiterConfig& limiter, int level, ExtensionMode mode) {
  limiter.validate();
  if (gains.size() != level + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("wavelet_enhance: {} gains for a level-{} decomposition (need {})",
                            gains.size(), level, level + 1));
  }

  EnhanceLog log;
  log.input_energy = energy(audio);

  const auto bands = apply_gains(wavedec(audio, level, mode), gains);
  AudioBuffer enhanced = waverec(bands);
  const double enhanced_energy = energy(enhanced);

  if (log.input_energy == 0.0) {
    // Silence in, silence out.
    log.pre_limiter_peak = enhanced.samples().abs().maxCoeff();
    log.output_energy = enhanced_energy;
    return {std::move(enhanced), log};
  }
  if (enhanced_energy == 0.0) {
    throw Error(ErrorCode::kDegenerateGains,
                "degenerate gains: the enhanced signal is all zero");
  }

  log.normalization_factor = std::sqrt(log.input_energy / enhanced_energy);
  AudioBuffer normalized = enhanced.with_samples(enhanced.samples() * log.normalization_factor);
  log.pre_limiter_peak = normalized.samples().abs().maxCoeff();

  if (log.pre_limiter_peak < limiter.peak_threshold) {
    log.output_energy = energy(normalized);
    log.energy_deviation = (log.output_energy - log.input_energy) / log.input_energy;
    return {std::move(normalized), log};
  }

  log.limiter_engaged = true;
  AudioBuffer limited = compress_peaks(normalized, limiter);
  log.output_energy = energy(limited);
  log.energy_deviation = (log.output_energy - log.input_energy) / log.input_energy;
  return {std::move(limited), log};
}

GainVector effective_gains(const GainVector& raw, double normalization_factor) {
  return GainVector(raw.values() * normalization_factor);
}

}  // namespace wavenhance
