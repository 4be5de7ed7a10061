#include "wavenhance/scorer.hpp"

#include <cctype>
#include <cstdint>

#include "wavenhance/error.hpp"

namespace wavenhance {

namespace {

// Decodes one UTF-8 code point starting at text[pos] and advances pos.
// Malformed bytes decode as themselves (Latin-1 fallback).
char32_t next_code_point(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  int extra = 0;
  char32_t cp = lead;
  if (lead >= 0xF0 && lead < 0xF8) {
    extra = 3;
    cp = lead & 0x07;
  } else if (lead >= 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if (lead >= 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  }
  if (lead >= 0xF8 || pos + extra >= text.size()) {
    ++pos;
    return lead;
  }
  for (int i = 1; i <= extra; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return lead;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += 1 + extra;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0x00A0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200B);
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019 || cp == 0x02BC; }

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
  return (cp >= 0x00A1 && cp <= 0x00BF && cp != 0x00AA && cp != 0x00B2 && cp != 0x00B3 &&
          cp != 0x00B5 && cp != 0x00B9 && cp != 0x00BA) ||
         cp == 0x00D7 || cp == 0x00F7 || (cp >= 0x2010 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x303F) || (cp >= 0xFE30 && cp <= 0xFE4F) ||
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

bool is_cjk(char32_t cp) {
  return (cp >= 0x3040 && cp <= 0x30FF) ||  // kana
         (cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0x4E00 && cp <= 0x9FFF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2FA1F);
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
  return cp;
}

}  // namespace

bool is_character_language(std::string_view language) {
  std::string primary;
  for (char c : language) {
    if (c == '-' || c == '_') break;
    primary += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return primary == "zh" || primary == "cmn" || primary == "yue" || primary == "ja";
}

TokenSequence normalize_text(std::string_view raw, std::string_view language) {
  TokenSequence seq;
  seq.language = std::string(language);
  const bool per_char = is_character_language(language);

  std::string word;
  auto flush = [&seq, &word] {
    if (!word.empty()) seq.tokens.push_back(std::move(word));
    word.clear();
  };

  std::size_t pos = 0;
  while (pos < raw.size()) {
    const char32_t cp = to_lower(next_code_point(raw, pos));
    if (is_apostrophe(cp)) continue;
    if (is_space(cp) || is_punctuation(cp)) {
      flush();
      continue;
    }
    if (per_char && is_cjk(cp)) {
      flush();
      append_utf8(word, cp);
      flush();
      continue;
    }
    append_utf8(word, cp);
  }
  flush();
  return seq;
}

ScoreReport transcription_accuracy(std::string_view hypothesis, std::string_view reference,
                                   std::string_view language) {
  ScoreReport report;
  report.reference = normalize_text(reference, language);
  report.hypothesis = normalize_text(hypothesis, language);
  if (report.reference.empty()) {
    throw Error(ErrorCode::kEmptyReference, "reference text is empty after normalization");
  }
  report.edit_distance = edit_distance<std::string>(report.hypothesis.tokens, report.reference.tokens);
  const double ratio =
      static_cast<double>(report.edit_distance) / static_cast<double>(report.reference.size());
  report.accuracy_percent = std::max(0.0, 1.0 - ratio) * 100.0;
  return report;
}

}  // namespace wavenhance
