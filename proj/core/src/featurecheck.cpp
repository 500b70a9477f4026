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

#include "obfusc/featurecheck.hpp"

#include "json.hpp"
#include "obfusc/error.hpp"

namespace obfusc {

using nlohmann::json;

ChangeVerdict verify_change(const std::vector<std::pair<std::string, std::string>>& originals,
                            const std::map<std::string, std::string>& paraphrases,
                            const std::string& feature_id, Direction direction,
                            const FeatureExtractor& extractor) {
    if (!extractor.schema().index_of(feature_id)) {
        throw DataError("feature '" + feature_id + "' is not in schema " + extractor.schema().version);
    }
    ChangeVerdict v;
    v.feature_id = feature_id;
    v.requested_direction = direction;
    if (originals.empty()) return v;

    double sum_before = 0.0, sum_after = 0.0;
    std::size_t moved = 0;
    v.doc_deltas.reserve(originals.size());
    for (const auto& [id, text] : originals) {
        const auto it = paraphrases.find(id);
        if (it == paraphrases.end()) throw DataError("no paraphrase for document '" + id + "'");
        const double before = extractor.value(text, feature_id);
        const double after = extractor.value(it->second, feature_id);
        sum_before += before;
        sum_after += after;
        const double d = after - before;
        v.doc_deltas.push_back(d);
        if (direction == Direction::increase ? d > 0.0 : d < 0.0) ++moved;
    }
    const auto n = static_cast<double>(originals.size());
    v.mean_before = sum_before / n;
    v.mean_after = sum_after / n;
    v.delta = v.mean_after - v.mean_before;
    v.frac_docs_moved = static_cast<double>(moved) / n;
    v.success = direction == Direction::increase ? v.delta > 0.0 : v.delta < 0.0;
    return v;
}

std::string verdict_label(const ChangeVerdict& v) {
    return std::string(v.success ? "successful " : "unsuccessful ") +
           std::string(to_string(v.requested_direction));
}

std::string verdicts_to_json(const std::vector<ChangeVerdict>& verdicts) {
    json arr = json::array();
    for (const auto& v : verdicts) {
        arr.push_back({{"dataset", v.dataset_id},
                       {"user", v.author_id},
                       {"feature", v.feature_id},
                       {"llm", v.llm},
                       {"direction", to_string(v.requested_direction)},
                       {"mean_before", v.mean_before},
                       {"mean_after", v.mean_after},
                       {"delta", v.delta},
                       {"frac_docs_moved", v.frac_docs_moved},
                       {"success", v.success},
                       {"verdict", verdict_label(v)},
                       {"doc_deltas", v.doc_deltas}});
    }
    return arr.dump(2);
}

std::vector<ChangeVerdict> verdicts_from_json(std::string_view json_text) {
    std::vector<ChangeVerdict> out;
    try {
        for (const auto& j : json::parse(json_text)) {
            ChangeVerdict v;
            v.dataset_id = j.at("dataset").get<std::string>();
            v.author_id = j.at("user").get<std::string>();
            v.feature_id = j.at("feature").get<std::string>();
            v.llm = j.value("llm", "");
            v.requested_direction = direction_from_string(j.at("direction").get<std::string>());
            v.mean_before = j.at("mean_before").get<double>();
            v.mean_after = j.at("mean_after").get<double>();
            v.delta = j.at("delta").get<double>();
            v.frac_docs_moved = j.at("frac_docs_moved").get<double>();
            v.success = j.at("success").get<bool>();
            v.doc_deltas = j.value("doc_deltas", std::vector<double>{});
            out.push_back(std::move(v));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed verdicts JSON: ") + e.what());
    }
    return out;
}

}  // namespace obfusc
