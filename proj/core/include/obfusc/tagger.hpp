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

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obfusc/tokenizer.hpp"

namespace obfusc {

/// The 17 Universal Dependencies tags plus SPACE for whitespace tokens.
enum class PosTag {
    ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X,
    SPACE
};

inline constexpr std::size_t kPosTagCount = 18;
inline constexpr std::array<PosTag, kPosTagCount> kAllPosTags{
    PosTag::ADJ,   PosTag::ADP,  PosTag::ADV,   PosTag::AUX,  PosTag::CCONJ, PosTag::DET,
    PosTag::INTJ,  PosTag::NOUN, PosTag::NUM,   PosTag::PART, PosTag::PRON,  PosTag::PROPN,
    PosTag::PUNCT, PosTag::SCONJ, PosTag::SYM,  PosTag::VERB, PosTag::X,     PosTag::SPACE};

std::string_view to_string(PosTag t);
PosTag pos_tag_from_string(std::string_view s);

/// Tags a token stream. Implementations must be immutable after
/// construction so a single instance can serve many threads.
class Tagger {
public:
    virtual ~Tagger() = default;
    /// One tag per token. Only the tags of word tokens are consulted; pos_tag
    /// overrides punct and space tokens.
    virtual std::vector<PosTag> tag(const TokenStream& stream) const = 0;
    virtual std::string name() const = 0;
};

/// Lexicon + suffix rules. Deterministic, needs no model file.
class RuleTagger final : public Tagger {
public:
    std::vector<PosTag> tag(const TokenStream& stream) const override;
    std::string name() const override { return "rule"; }

    /// Tag for a single lowercased word out of context, or X when unknown
    /// to both the lexicon and the suffix rules.
    static PosTag lexical_tag(std::string_view lower_word);
};

/// Greedy left-to-right averaged perceptron over word, affix, shape and
/// previous-tag features.
class PerceptronTagger final : public Tagger {
public:
    using Sentence = std::vector<std::pair<std::string, PosTag>>;

    PerceptronTagger() = default;

    /// Trains for `epochs` passes; sentence order is shuffled per epoch
    /// with `seed`. Words seen at least `tagdict_min_count` times with a
    /// single tag skip the model at inference time.
    static PerceptronTagger train(const std::vector<Sentence>& sentences, int epochs,
                                  std::uint64_t seed, int tagdict_min_count = 20);

    /// Loads weights written by save(). Throws DataError when the file is
    /// missing, unparsable, or its checksum does not match.
    static PerceptronTagger load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    std::vector<PosTag> tag(const TokenStream& stream) const override;
    std::vector<PosTag> tag_words(const std::vector<std::string>& words) const;
    std::string name() const override { return "perceptron"; }

private:
    using Weights = std::unordered_map<std::string, std::array<double, kPosTagCount>>;

    PosTag predict(const std::vector<std::string>& features) const;

    Weights weights_;
    std::unordered_map<std::string, PosTag> tagdict_;
};

/// pos_tag: tagger output for word tokens, PUNCT for punct tokens and SPACE
/// for space tokens.
std::vector<PosTag> pos_tag(const TokenStream& stream, const Tagger& tagger);

/// "rule" or "perceptron:<weights path>".
std::shared_ptr<const Tagger> make_tagger(std::string_view spec);

}  // namespace obfusc
