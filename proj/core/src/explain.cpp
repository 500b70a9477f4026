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

#include "obfusc/explain.hpp"

#include <cmath>

#include "json.hpp"
#include "obfusc/error.hpp"

namespace obfusc {

using nlohmann::json;

std::string_view to_string(WeightSign s) { return s == WeightSign::positive ? "positive" : "negative"; }

std::string_view to_string(Direction d) { return d == Direction::increase ? "increase" : "decrease"; }

Direction direction_from_string(std::string_view s) {
    if (s == "increase") return Direction::increase;
    if (s == "decrease") return Direction::decrease;
    throw DataError("unknown direction '" + std::string(s) + "'");
}

namespace {

void check_schema(const VerifierModel& model, const FeatureVector& x) {
    if (x.schema_version != model.schema_version || x.values.size() != model.weights.size()) {
        throw SchemaMismatch("vector with schema " + x.schema_version + " cannot be explained by a " +
                             model.schema_version + " model");
    }
}

}  // namespace

std::vector<double> background_mean(const VerifierModel& model,
                                    const std::vector<FeatureVector>& background) {
    if (background.empty()) throw DataError("SHAP background is empty");
    std::vector<double> mu(model.weights.size(), 0.0);
    for (const auto& b : background) {
        check_schema(model, b);
        const auto z = model.standardizer.transform(b.values);
        for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += z[j];
    }
    for (auto& v : mu) v /= static_cast<double>(background.size());
    return mu;
}

namespace {

std::vector<double> shap_row(const VerifierModel& model, const std::vector<double>& mu,
                             const FeatureVector& x) {
    check_schema(model, x);
    const auto z = model.standardizer.transform(x.values);
    std::vector<double> phi(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) phi[j] = model.weights[j] * (z[j] - mu[j]);
    return phi;
}

}  // namespace

std::vector<double> linear_shap(const VerifierModel& model,
                                const std::vector<FeatureVector>& background,
                                const FeatureVector& x) {
    return shap_row(model, background_mean(model, background), x);
}

ShapMatrix shap_matrix(const VerifierModel& model, const std::vector<FeatureVector>& docs) {
    ShapMatrix m;
    m.schema_version = model.schema_version;
    m.background_mean = background_mean(model, docs);
    m.base_value = model.bias;
    for (std::size_t j = 0; j < m.background_mean.size(); ++j)
        m.base_value += model.weights[j] * m.background_mean[j];
    m.rows.reserve(docs.size());
    for (const auto& d : docs) m.rows.push_back(shap_row(model, m.background_mean, d));
    return m;
}

std::vector<double> mean_abs_shap(const VerifierModel& model,
                                  const std::vector<FeatureVector>& validation) {
    if (validation.empty()) throw DataError("validation set for '" + model.author_id + "' is empty");
    const ShapMatrix m = shap_matrix(model, validation);
    std::vector<double> mean(model.weights.size(), 0.0);
    for (const auto& row : m.rows)
        for (std::size_t j = 0; j < row.size(); ++j) mean[j] += std::abs(row[j]);
    for (auto& v : mean) v /= static_cast<double>(m.rows.size());
    return mean;
}

FeatureAttribution top_feature(const VerifierModel& model, const FeatureSchema& schema,
                               const std::vector<FeatureVector>& validation) {
    if (schema.version != model.schema_version || schema.size() != model.weights.size()) {
        throw SchemaMismatch("schema " + schema.version + " does not match model schema " +
                             model.schema_version);
    }
    const auto mean = mean_abs_shap(model, validation);
    std::size_t best = 0;
    for (std::size_t j = 1; j < mean.size(); ++j)
        if (mean[j] > mean[best]) best = j;
    FeatureAttribution a;
    a.author_id = model.author_id;
    a.feature_id = schema.entries[best].feature_id;
    a.display_name = schema.entries[best].display_name;
    a.mean_abs_shap = mean[best];
    a.weight_sign = model.weights[best] > 0 ? WeightSign::positive : WeightSign::negative;
    a.prompt_direction = a.weight_sign == WeightSign::positive ? Direction::decrease : Direction::increase;
    return a;
}

FeatureAttribution top_feature(const VerifierModel& model, const BinaryTask& task,
                               const FeatureExtractor& extractor) {
    std::vector<FeatureVector> validation;
    for (const auto& lv : labeled_split(task, Split::val, extractor)) validation.push_back(lv.features);
    FeatureAttribution a = top_feature(model, extractor.schema(), validation);
    a.dataset_id = task.dataset_id;
    return a;
}

std::string attributions_to_json(const std::vector<FeatureAttribution>& attributions) {
    json rows = json::array();
    for (const auto& a : attributions) {
        rows.push_back({{"dataset", a.dataset_id},
                        {"user", a.author_id},
                        {"feature_id", a.feature_id},
                        {"display_name", a.display_name},
                        {"mean_abs_shap", a.mean_abs_shap},
                        {"weight_sign", std::string(to_string(a.weight_sign))},
                        {"direction", std::string(to_string(a.prompt_direction))}});
    }
    return rows.dump(2);
}

std::vector<FeatureAttribution> attributions_from_json(std::string_view json_text) {
    std::vector<FeatureAttribution> out;
    try {
        for (const auto& r : json::parse(json_text)) {
            FeatureAttribution a;
            a.dataset_id = r.value("dataset", std::string());
            a.author_id = r.at("user").get<std::string>();
            a.feature_id = r.at("feature_id").get<std::string>();
            a.display_name = r.at("display_name").get<std::string>();
            a.mean_abs_shap = r.at("mean_abs_shap").get<double>();
            a.weight_sign = r.at("weight_sign") == "positive" ? WeightSign::positive : WeightSign::negative;
            a.prompt_direction = direction_from_string(r.at("direction").get<std::string>());
            out.push_back(std::move(a));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed attribution JSON: ") + e.what());
    }
    return out;
}

}  // namespace obfusc
