#include "graphmind/text.hpp"

#include <array>

namespace graphmind {

namespace {

// Decodes one UTF-8 codepoint starting at position i. Returns the codepoint
// and advances i past it, or returns -1 (advancing by one byte) on malformed
// input.
std::int32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    std::int32_t cp = 0;
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
        ++i;
        return -1;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return -1;
    }
    for (int k = 1; k < len; ++k) {
        unsigned char bk = byte(i + static_cast<std::size_t>(k));
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return -1;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    // Reject overlong encodings, surrogates, and out-of-range values.
    static constexpr std::array<std::int32_t, 5> min_cp = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_cp[static_cast<std::size_t>(len)] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return -1;
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

void encode_utf8(std::int32_t cp, std::string& out) {
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

bool ascii_alnum(std::int32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

std::int32_t fold_case(std::int32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

} // namespace

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        std::int32_t cp = decode_utf8(text, i);
        bool word = cp >= 0x80 || (cp >= 0 && ascii_alnum(cp));
        if (!word) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        encode_utf8(fold_case(cp), out);
    }
    return out;
}

std::string link_key(std::string_view text) {
    std::string normalized = normalize_text(text);
    std::string out;
    out.reserve(normalized.size());
    for (char c : normalized) {
        if (c != ' ') out.push_back(c);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::string normalized = normalize_text(text);
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start < normalized.size()) {
        std::size_t end = normalized.find(' ', start);
        if (end == std::string::npos) end = normalized.size();
        if (end > start) tokens.emplace_back(normalized.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

bool utf8_valid(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        if (decode_utf8(bytes, i) < 0) return false;
    }
    return true;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int k = 15; k >= 0; --k) {
        out[static_cast<std::size_t>(k)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

} // namespace graphmind
