#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

#include "wavenhance/enhancer.hpp"
#include "wavenhance/scorer.hpp"

namespace wavenhance {

// Offline transcriber keyed by audio_digest(). Fixture files hold one
// "<sha256-hex><TAB><transcript>" entry per line; blank lines and lines
// starting with '#' are ignored.
class FixtureTranscriber final : public Transcriber {
 public:
  FixtureTranscriber() = default;
  // Adds every entry of a fixture file; later entries replace earlier ones.
  void load(const std::filesystem::path& path);

  void add(const std::string& digest, std::string transcript);
  void add(const AudioBuffer& audio, std::string transcript);
  std::size_t size() const;

  // Throws kUnknownFixture for audio that was never registered.
  Transcript transcribe(const AudioBuffer& audio, std::string_view language) override;
  std::string name() const override { return "fixture"; }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::string> table_;
};

// Fraction of total energy in each wavelet band (same order as the bands).
std::vector<double> band_energy_profile(const AudioBuffer& audio, int level = kDefaultLevel);

// RMS over bands of the per-band dB difference between two profiles. Shares
// are floored at 1e-12 before taking logs.
double profile_distance_db(const std::vector<double>& a, const std::vector<double>& b);

struct SyntheticTranscriberConfig {
  std::string reference_text;
  std::vector<double> target_profile;
  int level = kDefaultLevel;
  // Profile distance at which every token is dropped; the dropped fraction
  // grows linearly up to it.
  double full_deletion_db = 30.0;
  std::uint64_t seed = 0x5eedULL;
};

// Closed-loop stand-in for a recognizer. It measures how far the audio's band
// energy profile is from a hidden target and deletes round(n * min(1, d / D))
// reference tokens, chosen by a seeded permutation fixed at construction.
// Deterministic: the same audio always yields the same transcript.
class SyntheticTranscriber final : public Transcriber {
 public:
  SyntheticTranscriber(SyntheticTranscriberConfig config, std::string_view language);

  // Target profile of `speech` enhanced with `planted` gains.
  static std::vector<double> planted_profile(const AudioBuffer& speech, const GainVector& planted,
                                             const LimiterConfig& limiter = {},
                                             int level = kDefaultLevel);

  std::size_t deleted_tokens(double distance_db) const;
  Transcript transcribe(const AudioBuffer& audio, std::string_view language) override;
  std::string name() const override { return "synthetic"; }
  const SyntheticTranscriberConfig& config() const { return config_; }

 private:
  SyntheticTranscriberConfig config_;
  std::vector<std::string> tokens_;
  std::vector<std::size_t> deletion_order_;
};

}  // namespace wavenhance
