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

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obfusc/tagger.hpp"

namespace obfusc {

enum class FeatureUnit { percent, per_100_tokens, count, ratio, scalar };

std::string_view to_string(FeatureUnit u);
FeatureUnit feature_unit_from_string(std::string_view s);

struct FeatureEntry {
    std::string feature_id;
    /// Natural phrase used when the feature is named in a prompt.
    std::string display_name;
    FeatureUnit unit = FeatureUnit::scalar;

    friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

struct FeatureSchema {
    std::string version;
    std::vector<FeatureEntry> entries;

    std::size_t size() const { return entries.size(); }
    std::optional<std::size_t> index_of(std::string_view feature_id) const;
    const FeatureEntry& at(std::string_view feature_id) const;
    /// Same entries restricted to `ids` (in schema order), versioned as a
    /// derived schema.
    FeatureSchema subset(std::span<const std::string> ids) const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct FeatureVector {
    std::string schema_version;
    std::vector<double> values;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline constexpr std::string_view kDefaultSchemaVersion = "wp-1";

/// Bundled function-word list, in feature order.
const std::vector<std::string>& default_function_words();
/// SHA-256 of the bundled list file.
std::string default_function_words_sha256();
/// Reads a word-per-line list ('#' comments allowed).
std::vector<std::string> load_function_words(const std::filesystem::path& path);

/// The "wp-1" schema. In order: char_count; uppercase_pct (share of
/// letters that are uppercase), digit_pct, whitespace_pct (share of all
/// characters); word_count; avg_word_length; wl_1..wl_14, wl_15plus
/// (percent of words); type_token_ratio, hapax_ratio (hapax types / types);
/// yule_k; eleven punctuation frequencies; 18 POS frequencies; one
/// frequency per function word (all per 100 tokens); sentence_count;
/// avg_sentence_len_words; sentence_len_std (population).
FeatureSchema default_schema();

/// wp-1 with a custom function-word list. Equals default_schema() for the
/// bundled list; otherwise versioned "wp-1+fw-<hash>".
FeatureSchema make_schema(const std::vector<std::string>& function_words);

/// Compiled extraction plan for a schema. Immutable; share across threads.
class FeatureExtractor {
public:
    FeatureExtractor(FeatureSchema schema, std::shared_ptr<const Tagger> tagger);
    ~FeatureExtractor();
    FeatureExtractor(FeatureExtractor&&) noexcept;
    FeatureExtractor& operator=(FeatureExtractor&&) noexcept;

    FeatureVector extract(std::string_view text) const;
    /// Single feature value; throws DataError for an id outside the schema.
    double value(std::string_view text, std::string_view feature_id) const;

    const FeatureSchema& schema() const { return schema_; }
    const Tagger& tagger() const { return *tagger_; }

private:
    struct Plan;
    FeatureSchema schema_;
    std::shared_ptr<const Tagger> tagger_;
    std::unique_ptr<Plan> plan_;
};

FeatureVector extract(std::string_view text, const FeatureSchema& schema,
                      std::shared_ptr<const Tagger> tagger);

std::string schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(std::string_view json_text);

/// Header "doc_id,<feature ids...>", one row per document, values printed
/// with round-trip precision. A sidecar <path>.schema.json holds the schema.
void write_feature_matrix(const std::filesystem::path& csv_path, const FeatureSchema& schema,
                          const std::vector<std::string>& doc_ids,
                          const std::vector<FeatureVector>& rows);

struct FeatureMatrix {
    FeatureSchema schema;
    std::vector<std::string> doc_ids;
    std::vector<FeatureVector> rows;
};

FeatureMatrix read_feature_matrix(const std::filesystem::path& csv_path);

}  // namespace obfusc
