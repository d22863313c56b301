#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace graphmind {

// Lowercases (ASCII plus the Latin-1 uppercase range), trims, and collapses
// each run of non-alphanumeric characters to a single space. Non-ASCII
// codepoints outside Latin-1 pass through unchanged and count as word
// characters, so CJK labels survive intact.
std::string normalize_text(std::string_view text);

// normalize_text with the spaces removed: the key under which entity labels
// are interned and matched, so "Liver Problem" and "LiverProblem" collide.
std::string link_key(std::string_view text);

// normalize_text split on spaces; empty input yields no tokens.
std::vector<std::string> tokenize(std::string_view text);

// True when the bytes form well-formed UTF-8 (no overlong forms, no
// surrogates, max U+10FFFF).
bool utf8_valid(std::string_view bytes);

std::uint64_t fnv1a64(std::string_view bytes);

// Hex rendering used for request digests (16 lowercase hex digits).
std::string to_hex(std::uint64_t value);

} // namespace graphmind
