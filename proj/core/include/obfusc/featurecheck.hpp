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

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "obfusc/explain.hpp"
#include "obfusc/stylometry.hpp"

namespace obfusc {

struct ChangeVerdict {
    std::string dataset_id;
    std::string author_id;
    std::string feature_id;
    /// Backend that produced the paraphrases ("" when not applicable).
    std::string llm;
    Direction requested_direction = Direction::decrease;
    double mean_before = 0.0;
    double mean_after = 0.0;
    double delta = 0.0;  // mean_after - mean_before
    double frac_docs_moved = 0.0;
    bool success = false;
    /// Per-document after - before, in the order of the originals.
    std::vector<double> doc_deltas;
};

/// Compares the raw feature value of each original with its paraphrase.
/// Success means the mean moved strictly in the requested direction.
/// Throws DataError when a paraphrase is missing and for an unknown feature.
ChangeVerdict verify_change(const std::vector<std::pair<std::string, std::string>>& originals,
                            const std::map<std::string, std::string>& paraphrases,
                            const std::string& feature_id, Direction direction,
                            const FeatureExtractor& extractor);

/// "successful increase", "unsuccessful decrease", ...
std::string verdict_label(const ChangeVerdict& v);

std::string verdicts_to_json(const std::vector<ChangeVerdict>& verdicts);
std::vector<ChangeVerdict> verdicts_from_json(std::string_view json_text);

}  // namespace obfusc
