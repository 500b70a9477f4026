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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace obfusc {

enum class Split { train, val, test, unassigned };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct Document {
    std::string id;
    std::string author_id;
    std::string dataset_id;
    std::string text;  // verbatim, never preprocessed
    Split split = Split::unassigned;

    friend bool operator==(const Document&, const Document&) = default;
};

struct SplitConfig {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    std::uint64_t seed = 0;

    /// Throws ConfigError unless all fractions are positive and sum to 1.
    void validate() const;
};

struct BinaryTask {
    std::string target_author;
    std::string dataset_id;
    std::vector<Document> positives;
    std::vector<Document> negatives;
    double neg_ratio = 1.0;

    std::vector<const Document*> positives_in(Split s) const;
    std::vector<const Document*> negatives_in(Split s) const;
};

enum class CorpusFormat { jsonl, csv, directory };

CorpusFormat corpus_format_from_string(std::string_view s);

/// Reads documents in input order. JSONL rows may carry a "split" field;
/// every other source yields Split::unassigned. `default_dataset` fills
/// the dataset id for sources that do not carry one (directory layout).
std::vector<Document> load_dataset(const std::filesystem::path& path, CorpusFormat format,
                                   std::string_view default_dataset = {});

/// Per-author stratified split. Counts come from largest-remainder rounding
/// of n * fraction; leftover ties are ordered by a seeded shuffle. Authors
/// with fewer than 10 documents are rejected.
std::vector<Document> assign_splits(std::vector<Document> docs, const SplitConfig& cfg);

/// Positives are all of the target's documents. Negatives are drawn without
/// replacement from other authors of the same dataset, split by split,
/// round(neg_ratio * positives) per split, spread as evenly as possible
/// across the other authors.
BinaryTask build_binary_task(std::string_view target, const std::vector<Document>& docs,
                             double neg_ratio, std::uint64_t seed);

/// Distinct author ids in first-appearance order.
std::vector<std::string> authors_of(const std::vector<Document>& docs);

/// One JSON object per line with the document fields; `label` (1 for the
/// target author, 0 otherwise) is added when provided.
std::string document_to_jsonl(const Document& doc, std::optional<int> label = std::nullopt);

void write_jsonl(const std::filesystem::path& path, const std::vector<Document>& docs);

/// Writes <dir>/{train,val,test}.jsonl with labels, the file contract the
/// transformer plug-in consumes.
void write_task_splits(const std::filesystem::path& dir, const BinaryTask& task);

}  // namespace obfusc
