#include <string_view>
#include <vector>

#include "tweetprobe/corpus.h"

namespace tweetprobe {
namespace {

struct CodePoint {
  char32_t value;
  size_t length;
};

constexpr char32_t kInvalid = 0xFFFD;

// Lenient decoder: a malformed sequence decodes as one replacement
// character spanning a single byte.
CodePoint decode(std::string_view text, size_t pos) {
  const auto byte = [&](size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};
  size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {kInvalid, 1};
  }
  if (pos + len > text.size()) return {kInvalid, 1};
  for (size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return {kInvalid, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' ||
         cp == '\f' || cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || is_ascii_digit(cp) ||
           cp == '_';
  }
  if (is_space(cp)) return false;
  // Latin-1 punctuation and symbols, general punctuation through misc
  // symbols, and emoji planes are not word characters.
  if (cp >= 0x00A1 && cp <= 0x00BF) return false;
  if (cp == 0x00D7 || cp == 0x00F7) return false;
  if (cp >= 0x2010 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;
  if (cp >= 0xFE00 && cp <= 0xFE0F) return false;
  if (cp >= 0xFFF0 && cp <= 0xFFFF) return false;
  return true;
}

bool is_upper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  if (cp >= 0x00C0 && cp <= 0x00DE) return cp != 0x00D7;
  if (cp >= 0x0100 && cp <= 0x0137) return cp % 2 == 0;
  if (cp >= 0x0139 && cp <= 0x0148) return cp % 2 == 1;
  if (cp >= 0x014A && cp <= 0x0177) return cp % 2 == 0;
  if (cp == 0x0178 || cp == 0x0179 || cp == 0x017B || cp == 0x017D) return true;
  if (cp >= 0x0391 && cp <= 0x03A9) return cp != 0x03A2;
  if (cp >= 0x0400 && cp <= 0x042F) return true;
  return false;
}

bool starts_with_ci(std::string_view text, size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

bool url_at(std::string_view text, size_t pos) {
  return starts_with_ci(text, pos, "http://") || starts_with_ci(text, pos, "https://") ||
         starts_with_ci(text, pos, "www.");
}

// '@' or '#' immediately followed by a word character.
bool sigil_at(std::string_view text, size_t pos, char sigil) {
  if (text[pos] != sigil || pos + 1 >= text.size()) return false;
  return is_word_char(decode(text, pos + 1).value);
}

size_t scan_word_chars(std::string_view text, size_t pos) {
  while (pos < text.size()) {
    CodePoint cp = decode(text, pos);
    if (!is_word_char(cp.value)) break;
    pos += cp.length;
  }
  return pos;
}

bool is_number(std::string_view s) {
  if (s.empty() || !is_ascii_digit(static_cast<unsigned char>(s.front()))) return false;
  bool prev_digit = false;
  for (char c : s) {
    if (is_ascii_digit(static_cast<unsigned char>(c))) {
      prev_digit = true;
    } else if ((c == '.' || c == ',') && prev_digit) {
      prev_digit = false;
    } else {
      return false;
    }
  }
  return prev_digit;
}

// Maximal run of word characters, with internal apostrophes ("don't") and
// digit-group separators ("1,000", "3.14") kept inside the run.
size_t scan_word_run(std::string_view text, size_t pos) {
  while (pos < text.size()) {
    CodePoint cp = decode(text, pos);
    if (is_word_char(cp.value)) {
      pos += cp.length;
      continue;
    }
    const size_t next = pos + cp.length;
    if (next >= text.size()) break;
    CodePoint after = decode(text, next);
    if ((cp.value == '\'' || cp.value == 0x2019) && is_word_char(after.value)) {
      pos = next;
      continue;
    }
    if ((cp.value == '.' || cp.value == ',') && pos > 0 &&
        is_ascii_digit(static_cast<unsigned char>(text[pos - 1])) &&
        is_ascii_digit(after.value)) {
      pos = next;
      continue;
    }
    break;
  }
  return pos;
}

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord: return "word";
    case TokenKind::kHashtag: return "hashtag";
    case TokenKind::kMention: return "mention";
    case TokenKind::kUrl: return "url";
    case TokenKind::kNumber: return "number";
    case TokenKind::kPunct: return "punct";
  }
  return "unknown";
}

bool counts_as_word(TokenKind kind) {
  return kind == TokenKind::kWord || kind == TokenKind::kHashtag ||
         kind == TokenKind::kMention || kind == TokenKind::kNumber;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  size_t pos = 0;
  while (pos < text.size()) {
    CodePoint cp = decode(text, pos);
    if (is_space(cp.value)) {
      pos += cp.length;
      continue;
    }
    const size_t start = pos;
    TokenKind kind;
    if (url_at(text, pos)) {
      kind = TokenKind::kUrl;
      while (pos < text.size()) {
        CodePoint c = decode(text, pos);
        if (is_space(c.value)) break;
        pos += c.length;
      }
    } else if (sigil_at(text, pos, '@')) {
      kind = TokenKind::kMention;
      pos = scan_word_chars(text, pos + 1);
    } else if (sigil_at(text, pos, '#')) {
      kind = TokenKind::kHashtag;
      pos = scan_word_chars(text, pos + 1);
    } else if (is_word_char(cp.value)) {
      pos = scan_word_run(text, pos);
      kind = is_number(text.substr(start, pos - start)) ? TokenKind::kNumber
                                                         : TokenKind::kWord;
    } else {
      kind = TokenKind::kPunct;
      pos += cp.length;
      while (pos < text.size()) {
        CodePoint c = decode(text, pos);
        if (is_space(c.value) || is_word_char(c.value) || url_at(text, pos) ||
            sigil_at(text, pos, '@') || sigil_at(text, pos, '#')) {
          break;
        }
        pos += c.length;
      }
    }
    Token token;
    token.surface = std::string(text.substr(start, pos - start));
    token.start = start;
    token.end = pos;
    token.kind = kind;
    token.capitalized = is_upper(decode(text, start).value);
    tokens.push_back(std::move(token));
  }
  return tokens;
}

}  // namespace tweetprobe
