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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace obfusc {

enum class TokenKind { word, punct, space };

struct Token {
    /// Surface form with typographic quotes folded to ASCII (' and ").
    std::string surface;
    TokenKind kind = TokenKind::word;
    /// Byte range in the original text.
    std::size_t offset = 0;
    std::size_t length = 0;

    friend bool operator==(const Token&, const Token&) = default;
};

struct TokenStream {
    std::vector<Token> tokens;
    /// Token index one past each sentence terminator, strictly increasing.
    std::vector<std::size_t> sentence_boundaries;
};

/// Word tokens are maximal runs of letters and digits, joined across an
/// apostrophe only when word characters sit on both sides. Every other
/// non-space character is its own punct token. Whitespace runs that contain
/// a newline or span at least two characters become one space token; single
/// spaces only separate. A sentence ends after '.', '!' or '?' when followed
/// by whitespace and an uppercase-initial word, or by the end of the text.
TokenStream tokenize(std::string_view text);

namespace text {

/// Decodes UTF-8; invalid bytes decode as U+FFFD and consume one byte.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t c);
bool is_punct(char32_t c);
/// Letters, digits, and any other code point that is neither space nor punct.
bool is_word_char(char32_t c);
bool is_upper(char32_t c);
bool is_letter(char32_t c);
bool is_digit(char32_t c);
char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);
/// Curly single/double quotes to ASCII; other characters unchanged.
char32_t fold_quote(char32_t c);
bool is_dash(char32_t c);

std::string lower(std::string_view utf8);
std::size_t length(std::string_view utf8);

}  // namespace text

}  // namespace obfusc
