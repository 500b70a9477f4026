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

#include <gtest/gtest.h>

#include "obfusc/tokenizer.hpp"

namespace obfusc {
namespace {

std::vector<std::string> surfaces(const TokenStream& s) {
    std::vector<std::string> out;
    for (const auto& t : s.tokens) out.push_back(t.surface);
    return out;
}

std::string kinds(const TokenStream& s) {
    std::string out;
    for (const auto& t : s.tokens) out += t.kind == TokenKind::word ? 'w' : t.kind == TokenKind::punct ? 'p' : 's';
    return out;
}

TEST(Tokenize, HelloWorld) {
    const auto s = tokenize("Hello, world. Hello!");
    EXPECT_EQ(surfaces(s), (std::vector<std::string>{"Hello", ",", "world", ".", "Hello", "!"}));
    EXPECT_EQ(kinds(s), "wpwpwp");
    EXPECT_EQ(s.sentence_boundaries, (std::vector<std::size_t>{4, 6}));
}

TEST(Tokenize, EmptyText) {
    const auto s = tokenize("");
    EXPECT_TRUE(s.tokens.empty());
    EXPECT_TRUE(s.sentence_boundaries.empty());
}

TEST(Tokenize, WhitespaceRule) {
    const auto two = tokenize("a  b");
    EXPECT_EQ(surfaces(two), (std::vector<std::string>{"a", "  ", "b"}));
    EXPECT_EQ(kinds(two), "wsw");
    EXPECT_EQ(kinds(tokenize("a b")), "ww");
    EXPECT_EQ(kinds(tokenize("a\nb")), "wsw");
    EXPECT_EQ(kinds(tokenize("a \n\t b")), "wsw");
    EXPECT_EQ(kinds(tokenize("  a")), "sw");
}

TEST(Tokenize, ApostrophesJoinOnlyInsideWords) {
    EXPECT_EQ(surfaces(tokenize("don't")), (std::vector<std::string>{"don't"}));
    EXPECT_EQ(surfaces(tokenize("'tis")), (std::vector<std::string>{"'", "tis"}));
    EXPECT_EQ(surfaces(tokenize("dogs' bones")), (std::vector<std::string>{"dogs", "'", "bones"}));
    // Typographic apostrophe folds to ASCII but still joins.
    EXPECT_EQ(surfaces(tokenize("isn’t")), (std::vector<std::string>{"isn't"}));
}

TEST(Tokenize, CurlyQuotesFoldWithByteOffsets) {
    const std::string text = "“Hi”";
    const auto s = tokenize(text);
    ASSERT_EQ(s.tokens.size(), 3u);
    EXPECT_EQ(s.tokens[0].surface, "\"");
    EXPECT_EQ(s.tokens[0].offset, 0u);
    EXPECT_EQ(s.tokens[0].length, 3u);
    EXPECT_EQ(s.tokens[1].surface, "Hi");
    EXPECT_EQ(s.tokens[1].offset, 3u);
    EXPECT_EQ(s.tokens[2].offset, 5u);
}

TEST(Tokenize, OffsetsCoverOriginalBytes) {
    const std::string text = "It's 5 o'clock -- time (again)!\n\nNew line; café — done.";
    const auto s = tokenize(text);
    std::string punct_in_text, punct_in_tokens;
    for (const auto& t : s.tokens) {
        ASSERT_LE(t.offset + t.length, text.size());
        if (t.kind != TokenKind::space) {
            const std::string slice = text.substr(t.offset, t.length);
            if (t.kind == TokenKind::word) {
                EXPECT_EQ(slice, t.surface);
            }
        }
        if (t.kind == TokenKind::punct) punct_in_tokens += t.surface;
    }
    // No punctuation character is lost; word-internal apostrophes stay in
    // their words ("It's", "o'clock").
    for (char32_t c : text::decode_utf8(text)) {
        if (text::is_punct(c) && c != U'\'') text::append_utf8(punct_in_text, text::fold_quote(c));
    }
    EXPECT_EQ(punct_in_tokens, punct_in_text);
}

TEST(Tokenize, SentenceBoundaries) {
    EXPECT_EQ(tokenize("Wait... What? Yes.").sentence_boundaries, (std::vector<std::size_t>{4, 6, 8}));
    // Lowercase continuation is not a new sentence.
    EXPECT_EQ(tokenize("e.g. the end").sentence_boundaries.size(), 0u);
    EXPECT_EQ(tokenize("Stop! and go.").sentence_boundaries, (std::vector<std::size_t>{5}));
    // A terminator followed only by whitespace closes the text.
    EXPECT_EQ(tokenize("Done.\n").sentence_boundaries, (std::vector<std::size_t>{2}));
    // No whitespace, no boundary.
    EXPECT_TRUE(tokenize("a.B").sentence_boundaries.empty());
}

TEST(Tokenize, DashesAndSymbols) {
    EXPECT_EQ(kinds(tokenize("a—b–c-d")), "wpwpwpw");
    EXPECT_TRUE(text::is_dash(U'-'));
    EXPECT_TRUE(text::is_dash(U'–'));
    EXPECT_TRUE(text::is_dash(U'—'));
    EXPECT_FALSE(text::is_dash(U'_'));
}

TEST(Utf8, InvalidBytesBecomeReplacementCharacters) {
    const auto cps = text::decode_utf8("\xff" "A\xe2\x82");
    ASSERT_EQ(cps.size(), 4u);
    EXPECT_EQ(cps[0], U'�');
    EXPECT_EQ(cps[1], U'A');
    EXPECT_EQ(text::encode_utf8(U"café \U0001F600"), "café \U0001F600");
    EXPECT_EQ(text::length("café"), 4u);
    EXPECT_EQ(text::lower("ÉCOLE Ab"), "école ab");
    EXPECT_NO_THROW(tokenize("\xff\xfe bad \xc0"));
}

TEST(Utf8, LettersExcludeSymbols) {
    EXPECT_TRUE(text::is_letter(U'é'));
    EXPECT_TRUE(text::is_letter(U'α'));
    EXPECT_FALSE(text::is_letter(U'½'));
    EXPECT_FALSE(text::is_letter(U'★'));
    EXPECT_TRUE(text::is_word_char(U'½'));
}

}  // namespace
}  // namespace obfusc
