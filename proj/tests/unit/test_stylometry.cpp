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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "obfusc/error.hpp"
#include "obfusc/hash.hpp"
#include "obfusc/rng.hpp"
#include "obfusc/stylometry.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace obfusc {
namespace {

constexpr const char* kFunctionWordsSha256 = "5b9e1c9553267f086dd93d71d2a39ffd999ce8ccb5b07dc93f1fc0f357b9a99d";

const FeatureExtractor& extractor() {
    static const FeatureExtractor fx(default_schema(), std::make_shared<RuleTagger>());
    return fx;
}

double at(const FeatureVector& v, std::string_view id) { return v.values.at(*default_schema().index_of(id)); }

TEST(Schema, ShapeAndDisplayNames) {
    const auto s = default_schema();
    EXPECT_EQ(s.version, "wp-1");
    EXPECT_EQ(s.size(), 56u + default_function_words().size());
    EXPECT_EQ(s.size(), 213u);
    EXPECT_EQ(s.at("punct_dquote").display_name, "double quotation marks");
    EXPECT_EQ(s.at("pos_SPACE").display_name, "whitespace (SPACE part-of-speech) tokens");
    EXPECT_EQ(s.entries.front().feature_id, "char_count");
    EXPECT_EQ(s.entries.back().feature_id, "sentence_len_std");
    EXPECT_TRUE(s.index_of("fw_example").has_value());
    EXPECT_EQ(s, default_schema());
    std::set<std::string> ids;
    for (const auto& e : s.entries) EXPECT_TRUE(ids.insert(e.feature_id).second) << e.feature_id;
}

TEST(Schema, FunctionWordListIsPinned) {
    EXPECT_EQ(default_function_words_sha256(), kFunctionWordsSha256);
    std::ifstream in(OBFUSC_FUNCTION_WORDS_FILE, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(sha256_hex(ss.str()), kFunctionWordsSha256);
    EXPECT_EQ(load_function_words(OBFUSC_FUNCTION_WORDS_FILE), default_function_words());
}

TEST(Schema, CustomFunctionWordsGetDerivedVersion) {
    EXPECT_EQ(make_schema(default_function_words()), default_schema());
    const auto custom = make_schema({"the", "whereas"});
    EXPECT_EQ(custom.size(), 58u);
    EXPECT_TRUE(custom.version.starts_with("wp-1+fw-"));
    EXPECT_EQ(custom.version.size(), std::string("wp-1+fw-").size() + 8);
}

TEST(Schema, JsonRoundTripAndSubset) {
    const auto s = default_schema();
    EXPECT_EQ(schema_from_json(schema_to_json(s)), s);
    const std::vector<std::string> ids = {"punct_comma", "char_count"};
    const auto sub = s.subset(ids);
    ASSERT_EQ(sub.size(), 2u);
    EXPECT_EQ(sub.entries[0].feature_id, "char_count");  // schema order
    EXPECT_NE(sub.version, s.version);
    EXPECT_THROW(s.at("nope"), DataError);
}

TEST(Extract, HelloWorldHandCounts) {
    const auto v = extractor().extract(testing::kHelloWorld);
    const auto expected = testing::hello_world_expected();
    ASSERT_EQ(v.values.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_NEAR(v.values[i], expected[i], 1e-9) << default_schema().entries[i].feature_id;
    }
}

TEST(Extract, EmptyTextIsZeroVector) {
    const auto v = extractor().extract("");
    EXPECT_EQ(v.schema_version, "wp-1");
    for (double x : v.values) EXPECT_EQ(x, 0.0);
}

TEST(Extract, SingleWord) {
    const auto v = extractor().extract("aaaa");
    EXPECT_EQ(at(v, "word_count"), 1.0);
    EXPECT_EQ(at(v, "avg_word_length"), 4.0);
    EXPECT_EQ(at(v, "type_token_ratio"), 1.0);
    for (const auto& e : default_schema().entries) {
        if (e.feature_id.starts_with("punct_")) {
            EXPECT_EQ(at(v, e.feature_id), 0.0);
        }
    }
}

TEST(Extract, DashesAndQuotesNormalised) {
    const auto straight = extractor().extract("He said \"no\" - 'fine' - ok.");
    const auto curly = extractor().extract("He said “no” — ‘fine’ – ok.");
    EXPECT_DOUBLE_EQ(at(straight, "punct_dquote"), at(curly, "punct_dquote"));
    EXPECT_DOUBLE_EQ(at(straight, "punct_squote"), at(curly, "punct_squote"));
    EXPECT_DOUBLE_EQ(at(straight, "punct_dash"), at(curly, "punct_dash"));
    EXPECT_GT(at(curly, "punct_dash"), 0.0);
}

TEST(Extract, ValueMatchesVectorAndRejectsUnknownIds) {
    const std::string text = "The cat, the dog and I went to Paris in 2021!";
    const auto v = extractor().extract(text);
    for (const char* id : {"fw_the", "pos_PROPN", "digit_pct", "punct_exclam"})
        EXPECT_EQ(extractor().value(text, id), at(v, id)) << id;
    EXPECT_THROW(extractor().value(text, "fw_zzz"), DataError);
}

TEST(Extract, DuplicationInvariances) {
    Rng rng(2718);
    const auto& schema = default_schema();
    for (int trial = 0; trial < 100; ++trial) {
        const std::string t = testing::random_text(rng);
        const auto a = extractor().extract(t);
        const auto b = extractor().extract(t + t);
        const double n_words = at(a, "word_count");
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const double expect = testing::doubled_value(schema.entries[i], a.values[i], n_words);
            ASSERT_NEAR(b.values[i], expect, 1e-9 * std::max(1.0, std::abs(expect)))
                << schema.entries[i].feature_id << " on: " << t;
        }
    }
}

TEST(Extract, StructuralInvariants) {
    Rng rng(31);
    const auto& schema = default_schema();
    for (int trial = 0; trial < 50; ++trial) {
        const std::string t = testing::random_text(rng);
        const auto v = extractor().extract(t);
        EXPECT_EQ(v, extractor().extract(t));
        double pos_sum = 0.0;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const auto& e = schema.entries[i];
            ASSERT_TRUE(std::isfinite(v.values[i]));
            if (e.unit == FeatureUnit::percent) {
                EXPECT_GE(v.values[i], 0.0);
                EXPECT_LE(v.values[i], 100.0);
            }
            if (e.feature_id.starts_with("pos_")) pos_sum += v.values[i];
        }
        EXPECT_NEAR(pos_sum, 100.0, 1e-9);
    }
}

TEST(FeatureMatrix, CsvRoundTripIsExact) {
    const fs::path dir = fs::temp_directory_path() / "obfusc-matrix-test";
    fs::create_directories(dir);
    const std::vector<std::string> ids = {"d1", "d,2"};
    const std::vector<FeatureVector> rows = {extractor().extract("One sentence here."),
                                             extractor().extract("Another, with 3.14159 digits; and more!")};
    write_feature_matrix(dir / "m.csv", default_schema(), ids, rows);
    EXPECT_TRUE(fs::exists(dir / "m.csv.schema.json"));
    const auto m = read_feature_matrix(dir / "m.csv");
    EXPECT_EQ(m.schema, default_schema());
    EXPECT_EQ(m.doc_ids, ids);
    EXPECT_EQ(m.rows, rows);
    fs::remove_all(dir);
}

}  // namespace
}  // namespace obfusc
