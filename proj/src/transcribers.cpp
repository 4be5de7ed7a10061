#include "wavenhance/transcribers.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>

#include "wavenhance/digest.hpp"
#include "wavenhance/error.hpp"

namespace wavenhance {

void FixtureTranscriber::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open fixture table '{}'", path.string()));
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab != 64 || line.find_first_not_of("0123456789abcdef") < 64) {
      throw Error(ErrorCode::kParse,
                  fmt::format("{}:{}: expected '<sha256-hex><TAB><transcript>'",
                              path.string(), line_no));
    }
    add(line.substr(0, tab), line.substr(tab + 1));
  }
}

void FixtureTranscriber::add(const std::string& digest, std::string transcript) {
  std::unique_lock lock(mutex_);
  table_[digest] = std::move(transcript);
}

void FixtureTranscriber::add(const AudioBuffer& audio, std::string transcript) {
  add(audio_digest(audio), std::move(transcript));
}

std::size_t FixtureTranscriber::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

Transcript FixtureTranscriber::transcribe(const AudioBuffer& audio, std::string_view) {
  const std::string digest = audio_digest(audio);
  std::shared_lock lock(mutex_);
  const auto it = table_.find(digest);
  if (it == table_.end()) {
    throw Error(ErrorCode::kUnknownFixture, fmt::format("unknown fixture: audio digest {}", digest));
  }
  return {it->second, false};
}

std::vector<double> band_energy_profile(const AudioBuffer& audio, int level) {
  const auto energies = band_energies(wavedec(audio, level));
  const double total = std::accumulate(energies.begin(), energies.end(), 0.0);
  std::vector<double> shares(energies.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t b = 0; b < energies.size(); ++b) shares[b] = energies[b] / total;
  }
  return shares;
}

double profile_distance_db(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "profile_distance_db: profile sizes differ");
  }
  constexpr double kFloor = 1e-12;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = 10.0 * std::log10(std::max(a[k], kFloor) / std::max(b[k], kFloor));
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

SyntheticTranscriber::SyntheticTranscriber(SyntheticTranscriberConfig config,
                                           std::string_view language)
    : config_(std::move(config)) {
  tokens_ = normalize_text(config_.reference_text, language).tokens;
  if (tokens_.empty()) {
    throw Error(ErrorCode::kEmptyReference, "synthetic transcriber: empty reference text");
  }
  if (static_cast<int>(config_.target_profile.size()) != config_.level + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic transcriber: target profile size must be level + 1");
  }
  if (!(config_.full_deletion_db > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic transcriber: full_deletion_db must be > 0");
  }
  // Fisher-Yates with an explicit draw so the order is the same on every
  // standard library.
  deletion_order_.resize(tokens_.size());
  std::iota(deletion_order_.begin(), deletion_order_.end(), std::size_t{0});
  std::mt19937_64 rng(config_.seed);
  for (std::size_t i = deletion_order_.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(deletion_order_[i - 1], deletion_order_[j]);
  }
}

std::vector<double> SyntheticTranscriber::planted_profile(const AudioBuffer& speech,
                                                          const GainVector& planted,
                                                          const LimiterConfig& limiter,
                                                          int level) {
  return band_energy_profile(wavelet_enhance(speech, planted, limiter, level).audio, level);
}

std::size_t SyntheticTranscriber::deleted_tokens(double distance_db) const {
  const double fraction = std::min(1.0, distance_db / config_.full_deletion_db);
  return static_cast<std::size_t>(std::lround(fraction * static_cast<double>(tokens_.size())));
}

Transcript SyntheticTranscriber::transcribe(const AudioBuffer& audio, std::string_view) {
  const double d = profile_distance_db(band_energy_profile(audio, config_.level),
                                       config_.target_profile);
  const std::size_t drop = deleted_tokens(d);
  std::vector<bool> dropped(tokens_.size(), false);
  for (std::size_t i = 0; i < drop; ++i) dropped[deletion_order_[i]] = true;

  Transcript out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (dropped[i]) continue;
    if (!out.text.empty()) out.text += ' ';
    out.text += tokens_[i];
  }
  return out;
}

}  // namespace wavenhance
