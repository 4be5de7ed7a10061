#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <string>

#include "wavenhance/audio.hpp"
#include "wavenhance/wavelet.hpp"

namespace wavenhance {

inline constexpr int kStandardBandCount = kDefaultLevel + 1;

// Per-band multipliers in band order (cA_L first, cD1 last). The standard
// pipeline uses six: {cA5, cD5, cD4, cD3, cD2, cD1}. All entries are finite
// and non-negative; the all-ones vector is the identity enhancement.
class GainVector {
 public:
  GainVector() : GainVector(unit()) {}
  explicit GainVector(Eigen::ArrayXd gains);
  GainVector(std::initializer_list<double> gains);

  static GainVector unit(int band_count = kStandardBandCount) {
    return GainVector(Eigen::ArrayXd::Ones(band_count));
  }

  int size() const { return static_cast<int>(gains_.size()); }
  double operator[](int band) const { return gains_[band]; }
  const Eigen::ArrayXd& values() const { return gains_; }
  GainVector with(int band, double gain) const;
  bool is_unit() const { return (gains_ == 1.0).all(); }

  friend bool operator==(const GainVector& a, const GainVector& b) {
    return a.gains_.size() == b.gains_.size() && (a.gains_ == b.gains_).all();
  }

 private:
  Eigen::ArrayXd gains_;
};

// Space-separated, 6 significant digits.
std::string to_string(const GainVector& gains);

struct LimiterConfig {
  double peak_threshold = 0.99;
  double knee_start = 0.80;

  // Throws kInvalidArgument unless 0 < knee_start < peak_threshold <= 1.
  void validate() const;
};

template <typename Scalar>
SubbandSet<Scalar> apply_gains(SubbandSet<Scalar> subbands, const GainVector& gains) {
  if (static_cast<int>(subbands.band_count()) != gains.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "apply_gains: gain count does not match band count");
  }
  for (int b = 0; b < gains.size(); ++b) {
    subbands.bands[static_cast<std::size_t>(b)] *= static_cast<Scalar>(gains[b]);
  }
  return subbands;
}

// Memoryless soft-knee waveshaper. |s| <= knee passes unchanged; above the
// knee the magnitude follows knee + (T - knee) * tanh((|s| - knee) / (T - knee)),
// which is continuous with unit slope at the knee and approaches T from below.
double compress_sample(double sample, const LimiterConfig& config);
AudioBuffer compress_peaks(const AudioBuffer& audio, const LimiterConfig& config = {});

struct EnhanceLog {
  double input_energy = 0.0;
  double output_energy = 0.0;
  double normalization_factor = 1.0;  // scale applied after IDWT
  double pre_limiter_peak = 0.0;
  bool limiter_engaged = false;
  double energy_deviation = 0.0;  // (output - input) / input, 0 for silent input
};

struct EnhanceResult {
  AudioBuffer audio;
  EnhanceLog log;
};

// DWT -> per-band gains -> IDWT -> renormalize to the input energy -> if the
// peak reaches the limiter threshold, soft-knee compress. Energy is not
// renormalized after compression; the deviation is reported in the log.
EnhanceResult wavelet_enhance(const AudioBuffer& audio, const GainVector& gains,
                              const LimiterConfig& limiter = {}, int level = kDefaultLevel,
                              ExtensionMode mode = ExtensionMode::kPeriodic);

// Raw gains times the post-IDWT normalization factor: the multipliers that
// actually reach each band of the output.
GainVector effective_gains(const GainVector& raw, double normalization_factor);

}  // namespace wavenhance
