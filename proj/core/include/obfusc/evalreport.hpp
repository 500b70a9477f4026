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
#include <optional>
#include <string>
#include <vector>

#include "obfusc/explain.hpp"
#include "obfusc/featurecheck.hpp"
#include "obfusc/stats.hpp"

namespace obfusc {

inline constexpr std::string_view kConditionOriginal = "original";
inline constexpr std::string_view kConditionZeroShot = "zeroshot";
inline constexpr std::string_view kConditionPersonalized = "personalized";
inline constexpr std::string_view kNoLlm = "none";

/// One verifier score before drops are attached.
struct MetricRow {
    std::string dataset;
    std::string user;
    std::string condition;  // original | zeroshot | personalized
    std::string verifier;   // logreg | transformer
    std::string llm = std::string(kNoLlm);
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

struct ResultRow {
    MetricRow metrics;
    /// Unset on original rows.
    std::optional<double> drop;
    std::optional<bool> ineffective;
};

struct ObfuscationRun {
    std::string run_id;
    std::string config_fingerprint;
    std::vector<ResultRow> rows;
    std::vector<FeatureAttribution> attributions;
    std::vector<ChangeVerdict> verdicts;
    std::vector<DipResult> dips;
};

/// Joins obfuscated rows to the original row of the same (dataset, user,
/// verifier) and attaches drop and flag. Row order is preserved. Throws
/// DataError for a duplicate key or a missing original row.
ObfuscationRun assemble(std::string run_id, std::string config_fingerprint,
                        std::vector<MetricRow> metrics,
                        std::vector<FeatureAttribution> attributions,
                        std::vector<ChangeVerdict> verdicts, std::vector<DipResult> dips);

/// Unweighted mean over users of one column; `dataset` empty = all datasets.
struct ColumnAverage {
    std::string dataset;  // "" for the grand average
    std::string verifier;
    std::string condition;
    std::string llm;
    double f1 = 0.0;
    std::optional<double> drop;
    std::size_t users = 0;
};
std::vector<ColumnAverage> column_averages(const ObfuscationRun& run);

enum class ReportFormat { markdown, csv, json };
ReportFormat report_format_from_string(std::string_view s);

std::string render(const ObfuscationRun& run, ReportFormat format);
/// Inverse of render(run, json).
ObfuscationRun parse_run_json(std::string_view json_text);

/// Scores from the transformer plug-in. Layout:
///   <dir>/<dataset>/<user>/<condition>[-<llm>]/{predictions.jsonl,metrics.json}
/// F1 is recomputed from the predictions at the threshold in metrics.json;
/// a mismatch beyond 1e-6 is a DataError.
std::vector<MetricRow> read_transformer_results(const std::filesystem::path& dir);

/// Metrics of one predictions.jsonl ({id, label, probability} rows).
Metrics metrics_from_predictions(const std::filesystem::path& predictions, double threshold);

}  // namespace obfusc
