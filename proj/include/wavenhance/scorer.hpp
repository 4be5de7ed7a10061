#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavenhance/audio.hpp"

namespace wavenhance {

struct TokenSequence {
  std::vector<std::string> tokens;
  std::string language;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// True for languages written without word separators, which are scored per
// character: zh, cmn, yue, ja (primary subtag, case-insensitive).
bool is_character_language(std::string_view language);

// Lowercases (ASCII and Latin-1 letters), drops apostrophes, turns every other
// punctuation character into a separator, and splits on whitespace. For
// character languages each CJK code point becomes its own token while runs of
// Latin letters and digits stay whole.
TokenSequence normalize_text(std::string_view raw, std::string_view language);

// Levenshtein distance with unit insert/delete/substitute costs, two-row DP.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct ScoreReport {
  double accuracy_percent = 0.0;
  TokenSequence hypothesis;
  TokenSequence reference;
  std::size_t edit_distance = 0;
};

// accuracy = 100 * max(0, 1 - distance / |reference|). Throws kEmptyReference
// when the reference normalizes to nothing.
ScoreReport transcription_accuracy(std::string_view hypothesis, std::string_view reference,
                                   std::string_view language);

struct Transcript {
  std::string text;
  // The recognizer answered but offered no alternatives. Distinct from an
  // error: the text is empty and scores as total deletion.
  bool no_hypotheses = false;
};

// Speech-to-text capability. Implementations must tolerate concurrent calls.
class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual Transcript transcribe(const AudioBuffer& audio, std::string_view language) = 0;
  virtual std::string name() const = 0;
};

}  // namespace wavenhance
