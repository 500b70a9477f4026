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

#include <string>
#include <vector>

#include "obfusc/stylometry.hpp"
#include "obfusc/verifier.hpp"

namespace obfusc {

enum class WeightSign { positive, negative };
enum class Direction { increase, decrease };

std::string_view to_string(WeightSign s);
std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

/// Per-document SHAP values in margin (log-odds) space.
struct ShapMatrix {
    std::string schema_version;
    std::vector<std::vector<double>> rows;
    /// Mean of the standardized background rows.
    std::vector<double> background_mean;
    /// Margin of the background mean (the SHAP base value).
    double base_value = 0.0;
};

struct FeatureAttribution {
    std::string dataset_id;
    std::string author_id;
    std::string feature_id;
    std::string display_name;
    double mean_abs_shap = 0.0;
    WeightSign weight_sign = WeightSign::positive;
    /// Moves the feature away from the author: positive weight => decrease.
    Direction prompt_direction = Direction::decrease;
};

/// Standardized background mean for a model.
std::vector<double> background_mean(const VerifierModel& model,
                                    const std::vector<FeatureVector>& background);

/// phi_i = w_i * (z_i - mu_i), z the standardized `x` and mu the
/// standardized background mean. Exact for a linear model with features
/// imputed independently from the background.
std::vector<double> linear_shap(const VerifierModel& model,
                                const std::vector<FeatureVector>& background,
                                const FeatureVector& x);

/// SHAP rows for every background document, explained against the
/// background itself.
ShapMatrix shap_matrix(const VerifierModel& model, const std::vector<FeatureVector>& docs);

/// Ranks features by mean |phi| over `validation` (which also serves as
/// the background); ties go to the earlier schema entry.
FeatureAttribution top_feature(const VerifierModel& model, const FeatureSchema& schema,
                               const std::vector<FeatureVector>& validation);

/// Mean |phi| per feature, in schema order.
std::vector<double> mean_abs_shap(const VerifierModel& model,
                                  const std::vector<FeatureVector>& validation);

/// Extracts features of the task's validation documents (positives and
/// negatives pooled) and delegates to the overload above.
FeatureAttribution top_feature(const VerifierModel& model, const BinaryTask& task,
                               const FeatureExtractor& extractor);

std::string attributions_to_json(const std::vector<FeatureAttribution>& attributions);
std::vector<FeatureAttribution> attributions_from_json(std::string_view json_text);

}  // namespace obfusc
