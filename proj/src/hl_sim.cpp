#include "wavenhance/hl_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <sstream>

#include "wavenhance/error.hpp"
#include "wavenhance/stft.hpp"

namespace wavenhance {

Audiogram::Audiogram(std::vector<Point> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.frequency_hz > 0.0) || !std::isfinite(p.frequency_hz)) {
      throw Error(ErrorCode::kInvalidArgument, "audiogram: frequencies must be positive");
    }
    if (!(p.loss_db >= 0.0) || !std::isfinite(p.loss_db)) {
      throw Error(ErrorCode::kInvalidArgument, "audiogram: losses must be finite and >= 0");
    }
    if (i > 0 && !(p.frequency_hz > points_[i - 1].frequency_hz)) {
      throw Error(ErrorCode::kInvalidArgument, "audiogram: frequencies must be strictly increasing");
    }
  }
}

Audiogram Audiogram::shifted(double db) const {
  auto pts = points_;
  for (auto& p : pts) p.loss_db += db;
  return Audiogram(std::move(pts));
}

Audiogram Audiogram::moderate_sloping() {
  return Audiogram({{125, 30}, {250, 30}, {500, 40}, {1000, 50}, {2000, 60}, {4000, 60}, {8000, 60}});
}

Audiogram Audiogram::normal() {
  return Audiogram({{125, 0}, {250, 0}, {500, 0}, {1000, 0}, {2000, 0}, {4000, 0}, {8000, 0}});
}

Audiogram parse_audiogram(std::string_view text, std::string_view source) {
  std::vector<Audiogram::Point> points;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double f = 0.0;
    double loss = 0.0;
    std::string extra;
    if (!(fields >> f)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: expected 'frequency_hz loss_db'", source, line_no));
    }
    if (!(fields >> loss) || (fields >> extra)) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: expected 'frequency_hz loss_db'", source, line_no));
    }
    if (!(f > 0.0) || !std::isfinite(f) || !(loss >= 0.0) || !std::isfinite(loss)) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: frequency must be > 0 and loss >= 0", source, line_no));
    }
    if (!points.empty() && !(f > points.back().frequency_hz)) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: frequency {} Hz is not above the previous {} Hz", source,
                              line_no, f, points.back().frequency_hz));
    }
    points.push_back({f, loss});
  }
  if (points.empty()) {
    throw Error(ErrorCode::kParse, fmt::format("{}: audiogram has no points", source));
  }
  return Audiogram(std::move(points));
}

Audiogram read_audiogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open audiogram '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_audiogram(buffer.str(), path.string());
}

double interpolate_loss(const Audiogram& audiogram, double frequency_hz) {
  if (audiogram.empty()) throw Error(ErrorCode::kInvalidArgument, "empty audiogram");
  if (!(frequency_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "interpolate_loss: frequency must be > 0");
  }
  const auto& pts = audiogram.points();
  if (frequency_hz <= pts.front().frequency_hz) return pts.front().loss_db;
  if (frequency_hz >= pts.back().frequency_hz) return pts.back().loss_db;
  const auto hi = std::upper_bound(pts.begin(), pts.end(), frequency_hz,
                                   [](double f, const auto& p) { return f < p.frequency_hz; });
  const auto lo = hi - 1;
  const double t = std::log(frequency_hz / lo->frequency_hz) /
                   std::log(hi->frequency_hz / lo->frequency_hz);
  return lo->loss_db + t * (hi->loss_db - lo->loss_db);
}

double absolute_threshold(double frequency_hz) {
  if (!(frequency_hz >= 20.0 && frequency_hz <= 20000.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("absolute_threshold: {} Hz outside 20..20000 Hz", frequency_hz));
  }
  const double khz = frequency_hz / 1000.0;
  return 3.64 * std::pow(khz, -0.8) - 6.5 * std::exp(-0.6 * (khz - 3.3) * (khz - 3.3)) +
         1e-3 * std::pow(khz, 4.0);
}

double RecruitmentConfig::exponent(double loss_db) {
  return std::min(2.5, 1.0 + std::max(0.0, loss_db) / 60.0);
}

AudioBuffer simulate_hearing_loss(const AudioBuffer& audio, const Audiogram& audiogram,
                                  const RecruitmentConfig& recruitment,
                                  const HearingLossOptions& options) {
  if (audiogram.empty()) throw Error(ErrorCode::kInvalidArgument, "empty audiogram");
  if (audio.empty()) throw Error(ErrorCode::kEmptyInput, "simulate_hearing_loss: empty audio");
  const int frame = options.frame;
  const int hop = options.hop;
  if (!is_power_of_two(frame) || frame < 4 || hop * 2 != frame) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulate_hearing_loss: frame must be a power of two and hop = frame / 2");
  }

  const Eigen::ArrayXd window = periodic_hann(frame).sqrt();
  const double window_sum = window.sum();
  const int bins = frame / 2 + 1;
  const double fs = audio.sample_rate_hz();
  const double cal = options.calibration_db_spl;

  // Per-bin constants.
  Eigen::ArrayXd loss(bins);
  Eigen::ArrayXd gate_db(bins);
  Eigen::ArrayXd amp_scale(bins);
  Eigen::ArrayXd extra_slope(bins);
  for (int k = 0; k < bins; ++k) {
    const double f = k * fs / frame;
    const double f_clamped = std::clamp(f, 20.0, 20000.0);
    loss[k] = interpolate_loss(audiogram, std::max(f, 1e-9));
    gate_db[k] = absolute_threshold(f_clamped) + loss[k];
    amp_scale[k] = (k == 0 || k == frame / 2 ? 1.0 : 2.0) / window_sum;
    extra_slope[k] = recruitment.enabled ? RecruitmentConfig::exponent(loss[k]) - 1.0 : 0.0;
  }

  // Padding of frame - hop on the left puts every input sample under two
  // frames; the right side is padded to a whole number of hops.
  const Eigen::Index n = audio.size();
  const Eigen::Index lead = frame - hop;
  const Eigen::Index frames = (n + lead + hop - 1) / hop + 1;
  const Eigen::Index padded_len = (frames - 1) * hop + frame;
  Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(padded_len);
  padded.segment(lead, n) = audio.samples();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(padded_len);

  RealFft fft(frame);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * hop;
    Spectrum spec = fft.forward(padded.segment(start, frame) * window);
    for (int k = 0; k < bins; ++k) {
      const double amplitude = std::abs(spec[k]) * amp_scale[k];
      if (amplitude <= 0.0) continue;
      const double level = cal + 20.0 * std::log10(amplitude);
      if (level < gate_db[k]) {
        spec[k] = 0.0;
        continue;
      }
      const double attenuated = level - loss[k];
      const double out_level = attenuated - extra_slope[k] * std::max(0.0, cal - attenuated);
      spec[k] *= std::pow(10.0, (out_level - level) / 20.0);
    }
    out.segment(start, frame) += fft.inverse(spec) * window;
  }
  return audio.with_samples(out.segment(lead, n));
}

}  // namespace wavenhance
