// Writes the bundled test signals: a speech-like utterance (voiced syllables
// with formant structure plus fricative bursts) and a music-like interference
// (slow chord progression over a soft pink-noise bed). Both are mono 16-bit.
#include <CLI11.hpp>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

#include "wavenhance/audio.hpp"
#include "wavenhance/error.hpp"

namespace {

using wavenhance::Samples;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double formant_weight(double f, const double (&centers)[3]) {
  constexpr double kWidths[3] = {90.0, 120.0, 180.0};
  constexpr double kLevels[3] = {1.0, 0.55, 0.3};
  double w = 0.02;
  for (int i = 0; i < 3; ++i) {
    const double z = (f - centers[i]) / kWidths[i];
    w += kLevels[i] * std::exp(-0.5 * z * z);
  }
  return w;
}

Samples speech_like(int rate, double seconds, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(seconds * rate);
  Samples x = Samples::Zero(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr double kVowels[5][3] = {
      {730, 1090, 2440}, {270, 2290, 3010}, {530, 1840, 2480}, {570, 840, 2410}, {300, 870, 2240}};

  Eigen::Index pos = static_cast<Eigen::Index>(0.15 * rate);
  int syllable = 0;
  while (pos < n - rate / 10) {
    const double dur = 0.16 + 0.14 * u(rng);
    const auto len = std::min<Eigen::Index>(static_cast<Eigen::Index>(dur * rate), n - pos);
    const auto& formants = kVowels[static_cast<int>(u(rng) * 5) % 5];
    const double f0 = 165.0 + 50.0 * u(rng);
    const double glide = (u(rng) - 0.5) * 0.3;
    double phase = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) {
      const double t = static_cast<double>(i) / len;
      const double env = std::pow(std::sin(std::numbers::pi * t), 0.6);
      const double f = f0 * (1.0 + glide * t + 0.01 * std::sin(kTwoPi * 5.5 * i / rate));
      phase += kTwoPi * f / rate;
      double v = 0.0;
      for (int h = 1; h * f < 5000.0; ++h) {
        v += formant_weight(h * f, formants) / std::sqrt(h) * std::sin(h * phase);
      }
      x[pos + i] += env * v;
    }
    pos += len;

    // Fricative: differentiated white noise, i.e. a high-pass hiss.
    if (syllable % 3 == 1) {
      const auto flen = std::min<Eigen::Index>(static_cast<Eigen::Index>(0.09 * rate), n - pos);
      double prev = 0.0;
      for (Eigen::Index i = 0; i < flen; ++i) {
        const double w = gauss(rng);
        const double env = std::sin(std::numbers::pi * static_cast<double>(i) / flen);
        x[pos + i] += 0.35 * env * (w - prev);
        prev = w;
      }
      pos += flen;
    }
    if (syllable % 4 == 3) pos += static_cast<Eigen::Index>((0.08 + 0.12 * u(rng)) * rate);
    pos += static_cast<Eigen::Index>(0.02 * rate);
    ++syllable;
  }
  return x;
}

Samples music_like(int rate, double seconds, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(seconds * rate);
  Samples x = Samples::Zero(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr double kChords[4][3] = {
      {261.63, 329.63, 392.00}, {220.00, 261.63, 329.63}, {174.61, 220.00, 261.63},
      {196.00, 246.94, 293.66}};
  const double chord_len = 0.625;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const int c = static_cast<int>(t / chord_len) % 4;
    const double local = std::fmod(t, chord_len) / chord_len;
    const double env = 0.6 + 0.4 * std::exp(-3.0 * local);
    double v = 0.0;
    for (double f : kChords[c]) {
      for (int h = 1; h <= 6; ++h) v += std::sin(kTwoPi * h * f * t) / (h * h);
      v += 0.5 * std::sin(kTwoPi * 0.5 * f * t);
    }
    x[i] = env * v;
  }
  // Pink-ish bed from a first-order leaky integrator of white noise.
  double state = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    state = 0.98 * state + 0.1 * gauss(rng);
    x[i] += 0.3 * state;
  }
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled speech-like and music-like test signals"};
  std::string speech_path = "speech.wav";
  std::string noise_path = "noise.wav";
  int rate = 44100;
  double seconds = 5.0;
  double rms = 0.05;
  std::uint64_t seed = 20240601;
  app.add_option("--speech", speech_path, "speech output path");
  app.add_option("--noise", noise_path, "interference output path");
  app.add_option("--rate", rate, "sample rate in Hz")->check(CLI::PositiveNumber);
  app.add_option("--seconds", seconds, "duration")->check(CLI::PositiveNumber);
  app.add_option("--rms", rms, "target rms of both signals")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::mt19937_64 rng(seed);
    const auto speech = wavenhance::normalize_rms(
        wavenhance::AudioBuffer(speech_like(rate, seconds, rng), rate), rms);
    const auto noise = wavenhance::normalize_rms(
        wavenhance::AudioBuffer(music_like(rate, seconds, rng), rate), rms);
    wavenhance::write_wav(speech_path, speech);
    wavenhance::write_wav(noise_path, noise);
    const auto s = wavenhance::signal_stats(speech);
    const auto m = wavenhance::signal_stats(noise);
    fmt::print("{}: rms={:.6g} peak={:.6g}\n{}: rms={:.6g} peak={:.6g}\n", speech_path, s.rms,
               s.peak, noise_path, m.rms, m.peak);
  } catch (const wavenhance::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return static_cast<int>(wavenhance::exit_class(e.code()));
  }
  return 0;
}
