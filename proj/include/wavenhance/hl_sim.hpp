#pragma once

#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "wavenhance/audio.hpp"

namespace wavenhance {

// Hearing loss in dB at ascending frequencies.
class Audiogram {
 public:
  struct Point {
    double frequency_hz;
    double loss_db;
  };

  Audiogram() = default;
  // Throws kInvalidArgument unless frequencies are positive and strictly
  // increasing and losses are finite and >= 0.
  explicit Audiogram(std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }
  bool empty() const { return points_.empty(); }
  // Every loss raised by `db`.
  Audiogram shifted(double db) const;

  // 30, 30, 40, 50, 60, 60, 60 dB at 125 .. 8000 Hz: moderate sloping
  // sensorineural loss.
  static Audiogram moderate_sloping();
  static Audiogram normal();

 private:
  std::vector<Point> points_;
};

// One "frequency_hz loss_db" pair per line, ascending frequency; blank lines
// and '#' comments skipped. Parse errors name the offending line number.
Audiogram parse_audiogram(std::string_view text, std::string_view source = "<audiogram>");
Audiogram read_audiogram(const std::filesystem::path& path);

// Linear in dB over log-frequency, flat beyond the end points. Throws
// kInvalidArgument for an empty audiogram or non-positive frequency.
double interpolate_loss(const Audiogram& audiogram, double frequency_hz);

// Threshold in quiet, dB SPL (Terhardt's fit):
//   3.64 (f/kHz)^-0.8 - 6.5 exp(-0.6 (f/kHz - 3.3)^2) + 1e-3 (f/kHz)^4
// Defined on 20 Hz .. 20 kHz.
double absolute_threshold(double frequency_hz);

struct RecruitmentConfig {
  bool enabled = true;

  // 1 + loss/60, capped at 2.5.
  static double exponent(double loss_db);
};

struct HearingLossOptions {
  int frame = 1024;
  int hop = 512;
  double calibration_db_spl = 100.0;  // level of a full-scale sine
};

// Short-time multiband simulation (each STFT bin is one band):
//   level  = calibration + 20 log10(sine amplitude implied by the bin)
//   gate   : level < absolute_threshold(f) + loss(f) -> bin zeroed
//   atten  : level -= loss(f)
//   recruit: level -= (exponent(loss) - 1) * max(0, calibration - level)
// i.e. with recruitment the attenuated level grows `exponent` dB per input dB
// up to the full-scale level. Overlap-add with a sqrt-Hann analysis/synthesis
// pair at 50% overlap. The output is not renormalized.
AudioBuffer simulate_hearing_loss(const AudioBuffer& audio, const Audiogram& audiogram,
                                  const RecruitmentConfig& recruitment,
                                  const HearingLossOptions& options = {});

}  // namespace wavenhance
