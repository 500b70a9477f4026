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

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/tagger.hpp"

namespace fs = std::filesystem;

namespace obfusc {
namespace {

std::vector<PosTag> tags_of(const std::string& text, const Tagger& tagger = RuleTagger()) {
    return pos_tag(tokenize(text), tagger);
}

TEST(PosTagNames, RoundTrip) {
    for (PosTag t : kAllPosTags) EXPECT_EQ(pos_tag_from_string(to_string(t)), t);
    EXPECT_THROW(pos_tag_from_string("NOPE"), DataError);
    EXPECT_EQ(kAllPosTags.size(), 18u);
}

TEST(RuleTagger, LexiconClasses) {
    EXPECT_EQ(tags_of("and")[0], PosTag::CCONJ);
    EXPECT_EQ(RuleTagger::lexical_tag("the"), PosTag::DET);
    EXPECT_EQ(RuleTagger::lexical_tag("because"), PosTag::SCONJ);
    EXPECT_EQ(RuleTagger::lexical_tag("she"), PosTag::PRON);
    EXPECT_EQ(RuleTagger::lexical_tag("would"), PosTag::AUX);
}

TEST(RuleTagger, ContextRules) {
    const auto t = tags_of("I want to run to the store and she quickly walked.");
    EXPECT_EQ(t[2], PosTag::PART);  // to + verb
    EXPECT_EQ(t[4], PosTag::ADP);   // to + determiner
    EXPECT_EQ(t[9], PosTag::ADV);   // -ly suffix
    EXPECT_EQ(t[10], PosTag::VERB); // -ed suffix
    const auto p = tags_of("We met Paris in 2020.");
    EXPECT_EQ(p[2], PosTag::PROPN);  // capitalised, unknown, mid-sentence
    EXPECT_EQ(p[4], PosTag::NUM);
    EXPECT_EQ(tags_of("Paris is big.")[0], PosTag::NOUN);  // sentence-initial
    EXPECT_EQ(tags_of("a ½ b")[1], PosTag::X);            // no letters or digits
}

TEST(PosTag, PunctAndSpaceAreForced) {
    const auto s = tokenize("Hi,  there!\n");
    const auto t = pos_tag(s, RuleTagger());
    ASSERT_EQ(t.size(), s.tokens.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (s.tokens[i].kind == TokenKind::punct) {
            EXPECT_EQ(t[i], PosTag::PUNCT);
        } else if (s.tokens[i].kind == TokenKind::space) {
            EXPECT_EQ(t[i], PosTag::SPACE);
        }
    }
}

std::vector<PerceptronTagger::Sentence> toy_treebank() {
    using enum PosTag;
    const std::vector<PerceptronTagger::Sentence> base = {
        {{"the", DET}, {"cat", NOUN}, {"sleeps", VERB}, {".", PUNCT}},
        {{"a", DET}, {"dog", NOUN}, {"runs", VERB}, {"quickly", ADV}, {".", PUNCT}},
        {{"she", PRON}, {"sees", VERB}, {"the", DET}, {"red", ADJ}, {"ball", NOUN}, {".", PUNCT}},
        {{"he", PRON}, {"and", CCONJ}, {"she", PRON}, {"run", VERB}, {"home", ADV}, {".", PUNCT}},
        {{"the", DET}, {"big", ADJ}, {"dog", NOUN}, {"barks", VERB}, {"loudly", ADV}, {".", PUNCT}},
    };
    std::vector<PerceptronTagger::Sentence> out;
    for (int i = 0; i < 10; ++i) out.insert(out.end(), base.begin(), base.end());
    return out;
}

TEST(PerceptronTagger, LearnsToyTreebank) {
    const auto tb = toy_treebank();
    const auto tagger = PerceptronTagger::train(tb, 5, 1, 1000);  // no tag dictionary shortcut
    std::size_t correct = 0, total = 0;
    for (const auto& sent : tb) {
        std::vector<std::string> words;
        for (const auto& [w, _] : sent) words.push_back(w);
        const auto pred = tagger.tag_words(words);
        for (std::size_t i = 0; i < sent.size(); ++i, ++total) correct += pred[i] == sent[i].second;
    }
    EXPECT_EQ(correct, total);
}

TEST(PerceptronTagger, SaveLoadRoundTripAndChecksum) {
    const fs::path dir = fs::temp_directory_path() / "obfusc-tagger-test";
    fs::create_directories(dir);
    const fs::path file = dir / "tagger.json";
    const auto tagger = PerceptronTagger::train(toy_treebank(), 5, 2);
    tagger.save(file);

    const auto loaded = PerceptronTagger::load(file);
    const auto stream = tokenize("The dog sees a red cat. She runs quickly!");
    EXPECT_EQ(tagger.tag(stream), loaded.tag(stream));
    EXPECT_EQ(make_tagger("perceptron:" + file.string())->tag(stream), tagger.tag(stream));

    // Flip one weight without updating the checksum.
    nlohmann::json j;
    std::ifstream(file) >> j;
    auto& weights = j["model"]["weights"];
    ASSERT_FALSE(weights.empty());
    auto& first = weights.begin().value();
    first[0] = first[0].get<double>() + 1.0;
    std::ofstream(file) << j.dump();
    EXPECT_THROW(PerceptronTagger::load(file), DataError);

    std::ofstream(file) << "{not json";
    EXPECT_THROW(PerceptronTagger::load(file), DataError);
    EXPECT_THROW(PerceptronTagger::load(dir / "missing.json"), DataError);
    fs::remove_all(dir);
}

TEST(MakeTagger, Specs) {
    EXPECT_EQ(make_tagger("rule")->name(), "rule");
    EXPECT_THROW(make_tagger("perceptron:/nonexistent/model.json"), DataError);
    EXPECT_THROW(make_tagger("spacy"), ConfigError);
}

}  // namespace
}  // namespace obfusc
