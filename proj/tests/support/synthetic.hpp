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
#include <string>
#include <vector>

#include "obfusc/corpus.hpp"

namespace obfusc::testing {

// Two authors drawing from one sentence generator. "alice" joins clauses
// with "! and", "bob" with a plain " and" and sometimes quotes a word.
struct SyntheticSpec {
    int docs_per_author = 60;
    int min_sentences = 4;
    int max_sentences = 8;
    double compound_rate = 0.85;
    double quote_rate = 0.3;
    std::uint64_t seed = 7;
};

inline constexpr const char* kPlantedAuthor = "alice";
inline constexpr const char* kOtherAuthor = "bob";
inline constexpr const char* kPlantedFeature = "punct_exclam";

std::vector<Document> synthetic_corpus(const SyntheticSpec& spec = {});

// Writes corpus.jsonl and run.json (mock backend, relative paths) into
// `dir` and returns the config path.
std::filesystem::path write_synthetic_fixture(const std::filesystem::path& dir, const SyntheticSpec& spec = {},
                                              int n_boot = 200);

}  // namespace obfusc::testing
