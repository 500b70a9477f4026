/*
 * Copyright 2026 The obfusc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "obfusc/tokenizer.hpp"

#include <utility>

namespace obfusc {

namespace text {

namespace {

// Decodes the code point starting at byte i; invalid or truncated
// sequences yield U+FFFD with length 1.
char32_t decode_one(std::string_view s, std::size_t i, std::size_t& len) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    len = 1;
    if (b0 < 0x80) return b0;
    std::size_t extra = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        return 0xFFFD;
    }
    if (i + extra >= s.size()) return 0xFFFD;
    for (std::size_t k = 1; k <= extra; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0xFFFD;
        cp = (cp << 6) | (b & 0x3F);
    }
    len = extra + 1;
    return cp;
}

}  // namespace

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t len = 0;
    for (std::size_t i = 0; i < s.size(); i += len) out.push_back(decode_one(s, i, len));
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
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

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) append_utf8(out, c);
    return out;
}

bool is_space(char32_t c) {
    switch (c) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F:
        case 0x3000: case 0xFEFF:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200B;
    }
}

bool is_punct(char32_t c) {
    if (c < 0x80) {
        return (c > 0x20 && c < 0x7F) && !((c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') ||
                                            (c >= U'A' && c <= U'Z'));
    }
    if (c >= 0x00A1 && c <= 0x00BF) {
        // ª ² ³ µ ¹ º ¼ ½ ¾ behave like word characters.
        return !(c == 0xAA || c == 0xB2 || c == 0xB3 || c == 0xB5 || c == 0xB9 || c == 0xBA ||
                 (c >= 0xBC && c <= 0xBE));
    }
    if (c == 0x00D7 || c == 0x00F7) return true;
    if (c >= 0x2010 && c <= 0x2027) return true;
    if (c >= 0x2030 && c <= 0x205E) return true;
    if (c >= 0x2190 && c <= 0x21FF) return true;  // arrows
    if (c >= 0x2212 && c <= 0x2213) return true;
    if (c >= 0x3001 && c <= 0x303F) return true;
    if (c >= 0xFF01 && c <= 0xFF0F) return true;
    if (c == 0xFFFD) return true;
    return false;
}

bool is_word_char(char32_t c) { return !is_space(c) && !is_punct(c) && c >= 0x20; }

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_upper(char32_t c) {
    if (c >= U'A' && c <= U'Z') return true;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return true;
    if (c >= 0x0391 && c <= 0x03A9) return true;
    if (c >= 0x0410 && c <= 0x042F) return true;
    return false;
}

bool is_letter(char32_t c) {
    if (c < 0x80) return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
    if (!is_word_char(c)) return false;
    // Alphabetic scripts; symbols such as ½, ™ or ★ are word characters
    // but not letters.
    constexpr std::pair<char32_t, char32_t> kRanges[] = {
        {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA}, {0x00C0, 0x02FF}, {0x0370, 0x058F},
        {0x05D0, 0x05EA}, {0x0620, 0x064A}, {0x0900, 0x0E7F}, {0x1E00, 0x1FFF}, {0x3040, 0x30FF},
        {0x3400, 0x9FFF}, {0xAC00, 0xD7AF}, {0xF900, 0xFAFF}};
    for (const auto& [lo, hi] : kRanges)
        if (c >= lo && c <= hi) return c != 0xD7 && c != 0xF7;
    return false;
}

char32_t to_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    if (c >= 0x0391 && c <= 0x03A9) return c + 32;
    if (c >= 0x0410 && c <= 0x042F) return c + 32;
    return c;
}

char32_t to_upper(char32_t c) {
    if (c >= U'a' && c <= U'z') return c - 32;
    if (c >= 0xE0 && c <= 0xFE && c != 0xF7) return c - 32;
    if (c >= 0x03B1 && c <= 0x03C9 && c != 0x03C2) return c - 32;
    if (c >= 0x0430 && c <= 0x044F) return c - 32;
    return c;
}

char32_t fold_quote(char32_t c) {
    switch (c) {
        case 0x2018: case 0x2019: case 0x201A: case 0x201B: case 0x02BC:
            return U'\'';
        case 0x201C: case 0x201D: case 0x201E: case 0x201F:
            return U'"';
        default:
            return c;
    }
}

bool is_dash(char32_t c) {
    return c == U'-' || (c >= 0x2010 && c <= 0x2015) || c == 0x2212;
}

std::string lower(std::string_view utf8) {
    std::u32string cps = decode_utf8(utf8);
    for (auto& c : cps) c = to_lower(c);
    return encode_utf8(cps);
}

std::size_t length(std::string_view utf8) { return decode_utf8(utf8).size(); }

}  // namespace text

namespace {

struct CodePoint {
    char32_t c;
    std::size_t offset;
    std::size_t length;
};

std::vector<CodePoint> code_points(std::string_view s) {
    std::vector<CodePoint> out;
    out.reserve(s.size());
    std::size_t len = 0;
    for (std::size_t i = 0; i < s.size(); i += len) {
        const char32_t c = text::decode_one(s, i, len);
        out.push_back({c, i, len});
    }
    return out;
}

bool is_terminator(const Token& t) {
    return t.kind == TokenKind::punct && (t.surface == "." || t.surface == "!" || t.surface == "?");
}

}  // namespace

TokenStream tokenize(std::string_view input) {
    TokenStream out;
    const auto cps = code_points(input);
    const std::size_t n = cps.size();
    // Whether raw whitespace immediately follows token i.
    std::vector<bool> space_after;

    auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        Token t;
        t.kind = kind;
        t.offset = cps[begin].offset;
        t.length = cps[end - 1].offset + cps[end - 1].length - t.offset;
        if (kind == TokenKind::space) {
            t.surface = std::string(input.substr(t.offset, t.length));
        } else {
            for (std::size_t k = begin; k < end; ++k) text::append_utf8(t.surface, text::fold_quote(cps[k].c));
        }
        out.tokens.push_back(std::move(t));
        space_after.push_back(end < n && text::is_space(cps[end].c));
    };

    std::size_t i = 0;
    while (i < n) {
        const char32_t c = cps[i].c;
        if (text::is_space(c)) {
            std::size_t j = i;
            bool newline = false;
            while (j < n && text::is_space(cps[j].c)) {
                newline = newline || cps[j].c == U'\n' || cps[j].c == U'\r';
                ++j;
            }
            if (newline || j - i >= 2) {
                emit(TokenKind::space, i, j);
            } else if (!space_after.empty()) {
                space_after.back() = true;
            }
            i = j;
            continue;
        }
        if (text::is_word_char(c)) {
            std::size_t j = i + 1;
            while (j < n) {
                if (text::is_word_char(cps[j].c)) {
                    ++j;
                } else if (text::fold_quote(cps[j].c) == U'\'' && j + 1 < n &&
                           text::is_word_char(cps[j + 1].c)) {
                    j += 2;
                } else {
                    break;
                }
            }
            emit(TokenKind::word, i, j);
            i = j;
            continue;
        }
        emit(TokenKind::punct, i, i + 1);
        ++i;
    }

    const auto& toks = out.tokens;
    for (std::size_t k = 0; k < toks.size(); ++k) {
        if (!is_terminator(toks[k])) continue;
        std::size_t next = k + 1;
        while (next < toks.size() && toks[next].kind == TokenKind::space) ++next;
        bool boundary = false;
        if (next == toks.size()) {
            boundary = true;
        } else {
            const bool whitespace_between = space_after[k] || toks[k + 1].kind == TokenKind::space;
            if (whitespace_between && toks[next].kind == TokenKind::word) {
                const auto first = text::decode_utf8(toks[next].surface);
                boundary = !first.empty() && text::is_upper(first[0]);
            }
        }
        if (boundary) out.sentence_boundaries.push_back(k + 1);
    }
    return out;
}

}  // namespace obfusc
