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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "obfusc/corpus.hpp"
#include "obfusc/llm_gateway.hpp"
#include "obfusc/verifier.hpp"

namespace obfusc {

struct DatasetSpec {
    std::string id;
    std::filesystem::path path;  // as written; resolved against the config dir
    CorpusFormat format = CorpusFormat::jsonl;
};

/// A named paraphrasing backend: either a mock rule or a live endpoint.
struct LlmSpec {
    std::string name;
    std::optional<std::string> mock_rule;
    LlmConfig config;
};

struct RunConfig {
    std::vector<DatasetSpec> datasets;
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    double neg_ratio = 1.0;
    std::optional<std::filesystem::path> function_words;
    /// Checked against the schema built from the function-word list.
    std::optional<std::string> schema_version;
    std::string tagger = "rule";
    Hyperparams logreg;
    double threshold = 0.5;
    std::vector<LlmSpec> llms;
    std::vector<std::string> conditions = {"zeroshot", "personalized"};
    std::vector<std::string> users;  // empty = every author
    int dip_n_boot = 10000;
    std::optional<std::filesystem::path> transformer_results;
    std::optional<std::filesystem::path> zero_shot_template;
    std::optional<std::filesystem::path> personalized_template;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    int concurrency = 4;

    /// Directory relative paths are resolved against.
    std::filesystem::path base_dir = ".";

    /// Parses and validates; unknown keys are ConfigErrors.
    static RunConfig from_json(std::string_view text, std::filesystem::path base_dir = ".");
    static RunConfig load(const std::filesystem::path& path);

    void validate() const;
    /// Canonical JSON (sorted keys, defaults filled, paths as written).
    std::string canonical_json() const;
    /// SHA-256 of canonical_json().
    std::string fingerprint() const;
    /// First 12 hex digits of the fingerprint.
    std::string run_id() const;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    SplitConfig split_config() const;
};

}  // namespace obfusc
