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

#include "obfusc/mock_backend.hpp"

#include <algorithm>
#include <charconv>

#include "obfusc/hash.hpp"
#include "obfusc/rng.hpp"
#include "obfusc/stylometry.hpp"
#include "obfusc/tagger.hpp"
#include "obfusc/tokenizer.hpp"

namespace obfusc {

namespace {

struct Edit {
    std::size_t offset;
    std::size_t length;
    std::string replacement;
};

std::string apply(std::string_view text, std::vector<Edit> edits) {
    std::stable_sort(edits.begin(), edits.end(),
                     [](const Edit& a, const Edit& b) { return a.offset < b.offset; });
    std::string out;
    std::size_t pos = 0;
    for (const auto& e : edits) {
        if (e.offset < pos) continue;  // overlapping edit, first one wins
        out.append(text.substr(pos, e.offset - pos));
        out += e.replacement;
        pos = e.offset + e.length;
    }
    out.append(text.substr(std::min(pos, text.size())));
    return out;
}

struct Sentence {
    std::size_t first;  // token index range [first, last)
    std::size_t last;
};

std::vector<Sentence> sentences_of(const TokenStream& s) {
    std::vector<Sentence> out;
    std::size_t start = 0;
    auto push = [&](std::size_t end) {
        std::size_t a = start;
        while (a < end && s.tokens[a].kind == TokenKind::space) ++a;
        std::size_t b = end;
        while (b > a && s.tokens[b - 1].kind == TokenKind::space) --b;
        if (a < b) out.push_back({a, b});
        start = end;
    };
    for (std::size_t b : s.sentence_boundaries) push(b);
    push(s.tokens.size());
    return out;
}

std::optional<std::size_t> first_word(const TokenStream& s, const Sentence& sent) {
    for (std::size_t i = sent.first; i < sent.last; ++i)
        if (s.tokens[i].kind == TokenKind::word) return i;
    return std::nullopt;
}

std::optional<std::size_t> last_word(const TokenStream& s, const Sentence& sent) {
    for (std::size_t i = sent.last; i > sent.first; --i)
        if (s.tokens[i - 1].kind == TokenKind::word) return i - 1;
    return std::nullopt;
}

std::size_t end_of(const Token& t) { return t.offset + t.length; }

// Removes token i together with one neighbouring separator space.
Edit remove_token(std::string_view text, const Token& t) {
    std::size_t off = t.offset, len = t.length;
    if (end_of(t) < text.size() && text[end_of(t)] == ' ') {
        ++len;
    } else if (off > 0 && text[off - 1] == ' ') {
        --off;
        ++len;
    }
    return {off, len, ""};
}

constexpr std::pair<std::string_view, char32_t> kPunctChars[] = {
    {"punct_comma", U','},     {"punct_period", U'.'}, {"punct_exclam", U'!'},
    {"punct_question", U'?'},  {"punct_semicolon", U';'}, {"punct_colon", U':'},
    {"punct_dash", U'-'},      {"punct_squote", U'\''},  {"punct_dquote", U'"'},
    {"punct_lparen", U'('},    {"punct_rparen", U')'}};

std::optional<char32_t> punct_char(std::string_view fid) {
    for (const auto& [id, c] : kPunctChars)
        if (id == fid) return c;
    return std::nullopt;
}

bool token_is(const Token& t, char32_t c) {
    if (t.kind != TokenKind::punct) return false;
    const auto cps = text::decode_utf8(t.surface);
    if (cps.size() != 1) return false;
    return c == U'-' ? text::is_dash(cps[0]) : cps[0] == c;
}

std::string utf8(char32_t c) {
    std::string s;
    text::append_utf8(s, c);
    return s;
}

constexpr std::pair<PosTag, std::string_view> kPosWords[] = {
    {PosTag::ADJ, "nice"},     {PosTag::ADP, "with"},  {PosTag::ADV, "really"},
    {PosTag::AUX, "would"},    {PosTag::CCONJ, "and"}, {PosTag::DET, "the"},
    {PosTag::INTJ, "oh"},      {PosTag::NOUN, "thing"}, {PosTag::NUM, "two"},
    {PosTag::PART, "not"},     {PosTag::PRON, "it"},   {PosTag::PROPN, "Paris"},
    {PosTag::SCONJ, "because"}, {PosTag::VERB, "said"}, {PosTag::X, "½"}};

// Inserts `word` after the first word of every sentence.
std::string insert_after_first_words(std::string_view text, std::string_view insertion) {
    const TokenStream s = tokenize(text);
    std::vector<Edit> edits;
    for (const auto& sent : sentences_of(s)) {
        if (auto w = first_word(s, sent)) edits.push_back({end_of(s.tokens[*w]), 0, std::string(insertion)});
    }
    return apply(text, std::move(edits));
}

std::string append_sentence(std::string_view text) {
    std::string out(text);
    while (!out.empty() && text::is_space(static_cast<unsigned char>(out.back()))) out.pop_back();
    const TokenStream s = tokenize(out);
    const bool terminated = !s.tokens.empty() && s.tokens.back().kind == TokenKind::punct &&
                            (s.tokens.back().surface == "." || s.tokens.back().surface == "!" ||
                             s.tokens.back().surface == "?");
    if (!out.empty() && !terminated) out += '.';
    if (!out.empty()) out += ' ';
    out += "This is more.";
    return out;
}

std::optional<PosTag> pos_of(std::string_view fid) {
    if (!fid.starts_with("pos_")) return std::nullopt;
    try {
        return pos_tag_from_string(fid.substr(4));
    } catch (const DataError&) {
        return std::nullopt;
    }
}

std::string map_letters(std::string_view text, char32_t (*fn)(char32_t)) {
    auto cps = text::decode_utf8(text);
    for (auto& c : cps) c = fn(c);
    return text::encode_utf8(cps);
}

}  // namespace

namespace mock {

bool movable(std::string_view fid) {
    if (punct_char(fid)) return true;
    if (auto t = pos_of(fid)) return *t != PosTag::SYM;
    if (fid.starts_with("fw_") && fid.size() > 3) return true;
    return fid == "uppercase_pct" || fid == "digit_pct" || fid == "whitespace_pct" ||
           fid == "char_count" || fid == "word_count" || fid == "sentence_count";
}

std::string strip_feature(std::string_view text, std::string_view fid) {
    const TokenStream s = tokenize(text);
    std::vector<Edit> edits;
    if (auto c = punct_char(fid)) {
        for (const auto& t : s.tokens) {
            if (!token_is(t, *c)) continue;
            switch (*c) {
                case U'!': case U'?': edits.push_back({t.offset, t.length, "."}); break;
                case U'.': edits.push_back({t.offset, t.length, ";"}); break;
                case U';': case U':': edits.push_back({t.offset, t.length, ","}); break;
                case U'-': {
                    const bool spaced = t.offset > 0 && text[t.offset - 1] == ' ' &&
                                        end_of(t) < text.size() && text[end_of(t)] == ' ';
                    edits.push_back(spaced ? remove_token(text, t) : Edit{t.offset, t.length, " "});
                    break;
                }
                default: edits.push_back({t.offset, t.length, ""}); break;
            }
        }
        return apply(text, std::move(edits));
    }
    if (auto tag = pos_of(fid)) {
        const auto tags = pos_tag(s, RuleTagger());
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (tags[i] != *tag) continue;
            const Token& t = s.tokens[i];
            if (t.kind == TokenKind::space) edits.push_back({t.offset, t.length, " "});
            else edits.push_back(remove_token(text, t));
        }
        return apply(text, std::move(edits));
    }
    if (fid.starts_with("fw_")) {
        const std::string_view word = fid.substr(3);
        for (const auto& t : s.tokens)
            if (t.kind == TokenKind::word && text::lower(t.surface) == word) edits.push_back(remove_token(text, t));
        return apply(text, std::move(edits));
    }
    if (fid == "uppercase_pct") return map_letters(text, &text::to_lower);
    if (fid == "digit_pct") {
        std::string out;
        for (char c : text)
            if (c < '0' || c > '9') out.push_back(c);
        return out;
    }
    if (fid == "whitespace_pct") {
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            const Token& t = s.tokens[i];
            if (t.kind == TokenKind::space) edits.push_back({t.offset, t.length, " "});
            else if (t.kind == TokenKind::punct && end_of(t) < text.size() && text[end_of(t)] == ' ' &&
                     !(i + 1 < s.tokens.size() && s.tokens[i + 1].kind == TokenKind::space))
                edits.push_back({end_of(t), 1, ""});
        }
        return apply(text, std::move(edits));
    }
    if (fid == "char_count" || fid == "word_count") {
        const auto sents = sentences_of(s);
        if (sents.size() >= 2) {
            const Token& a = s.tokens[sents.back().first];
            std::size_t off = a.offset;
            while (off > 0 && text::is_space(static_cast<unsigned char>(text[off - 1]))) --off;
            return std::string(text.substr(0, off));
        }
        for (std::size_t i = s.tokens.size(); i > 0; --i) {
            if (s.tokens[i - 1].kind == TokenKind::word) {
                edits.push_back(remove_token(text, s.tokens[i - 1]));
                break;
            }
        }
        return apply(text, std::move(edits));
    }
    if (fid == "sentence_count") {
        const auto sents = sentences_of(s);
        for (std::size_t k = 0; k + 1 < sents.size(); ++k) {
            const Token& term = s.tokens[sents[k].last - 1];
            if (term.kind == TokenKind::punct) edits.push_back({term.offset, term.length, ","});
            if (auto w = first_word(s, sents[k + 1])) {
                const Token& t = s.tokens[*w];
                edits.push_back({t.offset, t.length, map_letters(t.surface, &text::to_lower)});
            }
        }
        return apply(text, std::move(edits));
    }
    throw ConfigError("mock backend cannot move feature '" + std::string(fid) + "'");
}

std::string add_feature(std::string_view text, std::string_view fid) {
    const TokenStream s = tokenize(text);
    std::vector<Edit> edits;
    if (auto c = punct_char(fid)) {
        const auto sents = sentences_of(s);
        if (*c == U'!' || *c == U'?' || *c == U'.') {
            for (const auto& sent : sents) {
                const Token& term = s.tokens[sent.last - 1];
                const bool is_term = token_is(term, U'.') || token_is(term, U'!') || token_is(term, U'?');
                if (is_term && !token_is(term, *c)) edits.push_back({term.offset, term.length, utf8(*c)});
            }
            if (!edits.empty()) return apply(text, std::move(edits));
            if (*c != U'.') {
                std::string out(text);
                while (!out.empty() && text::is_space(static_cast<unsigned char>(out.back()))) out.pop_back();
                return out + utf8(*c);
            }
            return insert_after_first_words(text, ".");
        }
        if (*c == U'"' || *c == U'\'' || *c == U'(' || *c == U')') {
            const std::string open = *c == U'(' || *c == U')' ? "(" : utf8(*c);
            const std::string close = *c == U'(' || *c == U')' ? ")" : utf8(*c);
            for (const auto& sent : sents) {
                if (auto w = last_word(s, sent)) {
                    const Token& t = s.tokens[*w];
                    edits.push_back({t.offset, t.length, open + t.surface + close});
                }
            }
            return apply(text, std::move(edits));
        }
        if (*c == U'-') return insert_after_first_words(text, " -");
        return insert_after_first_words(text, utf8(*c));
    }
    if (auto tag = pos_of(fid)) {
        if (*tag == PosTag::PUNCT) return insert_after_first_words(text, ",");
        if (*tag == PosTag::SPACE) return insert_after_first_words(text, "\n\n");
        for (const auto& [t, word] : kPosWords)
            if (t == *tag) return insert_after_first_words(text, " " + std::string(word));
        throw ConfigError("mock backend cannot add feature '" + std::string(fid) + "'");
    }
    if (fid.starts_with("fw_")) return insert_after_first_words(text, " " + std::string(fid.substr(3)));
    if (fid == "uppercase_pct") {
        for (const auto& sent : sentences_of(s)) {
            if (auto w = first_word(s, sent)) {
                const Token& t = s.tokens[*w];
                edits.push_back({t.offset, t.length, map_letters(text.substr(t.offset, t.length), &text::to_upper)});
            }
        }
        std::string out = apply(text, std::move(edits));
        if (out == text) out = map_letters(text, &text::to_upper);
        return out;
    }
    if (fid == "digit_pct") return insert_after_first_words(text, " 2");
    if (fid == "whitespace_pct") {
        std::string out;
        for (char c : text) {
            out.push_back(c);
            if (c == ' ') out.push_back(' ');
        }
        return out;
    }
    if (fid == "char_count" || fid == "word_count" || fid == "sentence_count") return append_sentence(text);
    throw ConfigError("mock backend cannot move feature '" + std::string(fid) + "'");
}

std::string shuffle_sentences(std::string_view text, std::uint64_t seed) {
    const TokenStream s = tokenize(text);
    const auto sents = sentences_of(s);
    if (sents.size() < 2) return std::string(text);
    std::vector<std::string> parts;
    for (const auto& sent : sents) {
        const std::size_t a = s.tokens[sent.first].offset;
        const std::size_t b = end_of(s.tokens[sent.last - 1]);
        parts.emplace_back(text.substr(a, b - a));
    }
    Rng rng(seed ^ hash64(text));
    rng.shuffle(std::span<std::string>(parts));
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += ' ';
        out += p;
    }
    return out;
}

}  // namespace mock

std::string extract_prompt_input(std::string_view prompt) {
    constexpr std::string_view kStart = "Input text: ";
    const auto a = prompt.find(kStart);
    if (a == std::string_view::npos) return std::string(prompt);
    std::string_view rest = prompt.substr(a + kStart.size());
    for (std::string_view tail : {"\noutput:", "\nOutput:"}) {
        if (const auto b = rest.rfind(tail); b != std::string_view::npos) {
            rest = rest.substr(0, b);
            break;
        }
    }
    return std::string(rest);
}

MockBackend::MockBackend(std::string rule) : rule_(std::move(rule)) {
    auto parse_seed = [&](std::string_view s) {
        std::uint64_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw ConfigError("mock rule '" + rule_ + "' has a malformed seed");
        }
        return v;
    };
    const std::string_view r = rule_;
    if (r == "identity") {
        op_ = Op::identity;
    } else if (r.starts_with("strip_feature:") || r.starts_with("add_feature:")) {
        op_ = r.starts_with("strip") ? Op::strip : Op::add;
        feature_ = std::string(r.substr(r.find(':') + 1));
        if (!mock::movable(feature_) || (op_ == Op::add && feature_ == "pos_SYM")) {
            throw ConfigError("mock rule '" + rule_ + "': feature cannot be moved by the mock");
        }
    } else if (r.starts_with("shuffle_sentences:")) {
        op_ = Op::shuffle;
        seed_ = parse_seed(r.substr(r.find(':') + 1));
    } else if (r == "follow_prompt" || r.starts_with("follow_prompt:")) {
        op_ = Op::follow;
        if (r.size() > std::string_view("follow_prompt").size()) seed_ = parse_seed(r.substr(r.find(':') + 1));
    } else {
        throw ConfigError("unknown mock rule '" + rule_ + "'");
    }
}

std::string MockBackend::transform(std::string_view text) const {
    switch (op_) {
        case Op::identity: return std::string(text);
        case Op::strip: return mock::strip_feature(text, feature_);
        case Op::add: return mock::add_feature(text, feature_);
        case Op::shuffle:
        case Op::follow: return mock::shuffle_sentences(text, seed_);
    }
    return std::string(text);
}

ChatReply MockBackend::complete(const std::string& prompt, const LlmConfig&) {
    const std::string input = extract_prompt_input(prompt);
    ChatReply reply;
    if (op_ != Op::follow) {
        reply.content = transform(input);
        return reply;
    }
    // Personalized prompts name the feature between ** markers, preceded by
    // "more" or "fewer".
    const auto open = prompt.find(" **");
    const auto close = open == std::string::npos ? open : prompt.find("**", open + 3);
    if (open != std::string::npos && close != std::string::npos) {
        const std::string display = prompt.substr(open + 3, close - open - 3);
        const std::string_view before = std::string_view(prompt).substr(0, open);
        const bool more = before.ends_with("more");
        const bool fewer = before.ends_with("fewer");
        for (const auto& e : default_schema().entries) {
            if (e.display_name != display || !mock::movable(e.feature_id)) continue;
            if (more && e.feature_id != "pos_SYM") {
                reply.content = mock::add_feature(input, e.feature_id);
                return reply;
            }
            if (fewer) {
                reply.content = mock::strip_feature(input, e.feature_id);
                return reply;
            }
        }
    }
    reply.content = mock::shuffle_sentences(input, seed_);
    return reply;
}

std::shared_ptr<MockBackend> mock_backend(const std::string& rule) {
    return std::make_shared<MockBackend>(rule);
}

}  // namespace obfusc
