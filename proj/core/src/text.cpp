#include "sentitrade/text.hpp"

#include <array>

namespace sentitrade {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one codepoint at `pos`, advancing it. Invalid sequences yield
// U+FFFD and consume a single byte.
char32_t decode(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
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
    ++pos;
    return kReplacement;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Base letters for U+00C0..U+00FF; nullptr keeps the codepoint.
constexpr std::array<const char*, 64> kLatin1 = {
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",   // C0
    "d", "n", "o", "o", "o", "o", "o", nullptr, "o", "u", "u", "u", "u", "y", "th", "ss",  // D0
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",   // E0
    "d", "n", "o", "o", "o", "o", "o", nullptr, "o", "u", "u", "u", "u", "y", "th", "y",   // F0
};

struct Range {
  char32_t first;
  char32_t last;
  const char* base;
};

// Latin Extended-A (U+0100..U+017F) plus the comma-below letters.
constexpr std::array<Range, 25> kLatinExtended = {{
    {0x0100, 0x0105, "a"}, {0x0106, 0x010D, "c"}, {0x010E, 0x0111, "d"},
    {0x0112, 0x011B, "e"}, {0x011C, 0x0123, "g"}, {0x0124, 0x0127, "h"},
    {0x0128, 0x0131, "i"}, {0x0132, 0x0133, "ij"}, {0x0134, 0x0135, "j"},
    {0x0136, 0x0138, "k"}, {0x0139, 0x0142, "l"}, {0x0143, 0x014B, "n"},
    {0x014C, 0x0151, "o"}, {0x0152, 0x0153, "oe"}, {0x0154, 0x0159, "r"},
    {0x015A, 0x0161, "s"}, {0x0162, 0x0167, "t"}, {0x0168, 0x0173, "u"},
    {0x0174, 0x0175, "w"}, {0x0176, 0x0178, "y"}, {0x0179, 0x017E, "z"},
    {0x017F, 0x017F, "s"}, {0x0218, 0x0219, "s"}, {0x021A, 0x021B, "t"},
    {0x1E9E, 0x1E9E, "ss"},
}};

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x00A0 || cp == 0x2007 || cp == 0x202F || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x3000;
}

// Appends the folded form of `cp`.
void fold_codepoint(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') cp = cp - 'A' + 'a';
    out.push_back(static_cast<char>(cp));
    return;
  }
  if (cp >= 0x0300 && cp <= 0x036F) return;  // combining marks
  if (cp >= 0x00C0 && cp <= 0x00FF) {
    if (const char* base = kLatin1[cp - 0x00C0]) {
      out += base;
      return;
    }
  }
  for (const auto& r : kLatinExtended) {
    if (cp >= r.first && cp <= r.last) {
      out += r.base;
      return;
    }
  }
  encode(cp, out);
}

// Codepoint ending just before byte offset `end` in valid UTF-8.
char32_t codepoint_before(std::string_view s, std::size_t end) {
  std::size_t start = end - 1;
  while (start > 0 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) --start;
  std::size_t pos = start;
  return decode(s, pos);
}

char32_t codepoint_at(std::string_view s, std::size_t pos) { return decode(s, pos); }

}  // namespace

std::string fold_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = decode(text, pos);
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    const std::size_t before = out.size();
    if (pending_space) out.push_back(' ');
    fold_codepoint(cp, out);
    if (out.size() == before + (pending_space ? 1 : 0)) {
      // dropped mark: keep the separator pending
      if (pending_space) out.pop_back();
      continue;
    }
    pending_space = false;
  }
  return out;
}

bool is_word_codepoint(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9') ||
           cp == '_';
  }
  if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7) return false;  // Latin-1 punctuation/symbols
  if (cp >= 0x2000) return false;                            // punctuation, symbols, emoji, ...
  return cp != kReplacement;
}

bool contains_on_boundary(std::string_view folded_text, std::string_view folded_keyword) {
  if (folded_keyword.empty()) return false;
  const bool check_front = is_word_codepoint(codepoint_at(folded_keyword, 0));
  const bool check_back =
      is_word_codepoint(codepoint_before(folded_keyword, folded_keyword.size()));
  std::size_t from = 0;
  while (true) {
    const auto hit = folded_text.find(folded_keyword, from);
    if (hit == std::string_view::npos) return false;
    const auto end = hit + folded_keyword.size();
    const bool front_ok =
        !check_front || hit == 0 || !is_word_codepoint(codepoint_before(folded_text, hit));
    const bool back_ok = !check_back || end == folded_text.size() ||
                         !is_word_codepoint(codepoint_at(folded_text, end));
    if (front_ok && back_ok) return true;
    from = hit + 1;
  }
}

std::vector<std::string> tokenize_folded(std::string_view folded_text) {
  std::vector<std::string> tokens;
  std::string cur;
  std::size_t pos = 0;
  while (pos < folded_text.size()) {
    const std::size_t start = pos;
    const char32_t cp = decode(folded_text, pos);
    if (is_word_codepoint(cp)) {
      cur.append(folded_text.substr(start, pos - start));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace sentitrade
