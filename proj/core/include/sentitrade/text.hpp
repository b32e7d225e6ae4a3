#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sentitrade {

/// Case- and diacritic-folds UTF-8 text for keyword and lexicon matching.
///
/// Latin letters (including the Turkish I/İ/ı/i family, ş, ğ, ç, ö, ü) fold
/// to lowercase ASCII, combining marks are dropped, and whitespace runs
/// collapse to a single space. Other scripts pass through unchanged.
/// Idempotent: fold(fold(s)) == fold(s).
std::string fold_text(std::string_view text);

/// True when the folded-text codepoint is part of a word (letters, digits,
/// underscore, non-Latin letters). Punctuation, symbols and emoji are not.
bool is_word_codepoint(char32_t cp);

/// Finds `folded_keyword` in `folded_text` at a token boundary: a word
/// character at either edge of the keyword may not touch another word
/// character in the text.
bool contains_on_boundary(std::string_view folded_text, std::string_view folded_keyword);

/// Splits folded text into maximal runs of word codepoints.
std::vector<std::string> tokenize_folded(std::string_view folded_text);

}  // namespace sentitrade
