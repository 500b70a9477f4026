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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "obfusc/corpus.hpp"
#include "obfusc/stylometry.hpp"

namespace obfusc {

inline constexpr double kStdFloor = 1e-8;

struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;  // population std, floored at kStdFloor

    static Standardizer fit(std::span<const std::vector<double>> rows);
    std::vector<double> transform(std::span<const double> x) const;
};

struct Hyperparams {
    double l2_lambda = 1e-2;
    double learning_rate = 0.1;
    int max_epochs = 2000;
    double tolerance = 1e-7;
    std::uint64_t seed = 0;
};

struct VerifierModel {
    std::string author_id;
    std::string schema_version;
    Standardizer standardizer;
    std::vector<double> weights;
    double bias = 0.0;
    Hyperparams hyperparams;
    std::string train_fingerprint;

    /// w . standardize(x) + b. Throws SchemaMismatch on version or length
    /// disagreement.
    double margin(const FeatureVector& x) const;
};

struct LabeledVector {
    std::string doc_id;
    FeatureVector features;
    int label = 0;  // 1 = written by the target author
};

struct TrainResult {
    VerifierModel model;
    /// Objective after every accepted epoch; front() is the initial value.
    std::vector<double> loss_history;
    int epochs_run = 0;
};

/// Fits the standardizer on `data`, then minimizes
///   mean log-loss + (l2_lambda / 2) * |w|^2   (bias unpenalized)
/// by full-batch gradient descent with an implicit (proximal) step for the
/// L2 term. An epoch whose objective would rise is rejected and the step
/// halved. Stops when the accepted decrease drops below `tolerance` or
/// after max_epochs. Throws DataError for single-class data and
/// NumericalError on a non-finite objective.
TrainResult fit_logistic(std::string author_id, const std::vector<LabeledVector>& data,
                         const Hyperparams& hyper);

/// Extracts features for the train split of `task` and fits a model.
VerifierModel train(const BinaryTask& task, const FeatureExtractor& extractor,
                    const Hyperparams& hyper);

/// sigmoid(margin), clamped into the open interval (0, 1).
double predict_proba(const VerifierModel& model, const FeatureVector& x);

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double threshold = 0.5;
};

/// Precision, recall and F1 of the positive class; 0/0 is taken as 0.
Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn,
                            double threshold = 0.5);

/// A document counts as predicted positive when its probability is at
/// least `threshold`.
Metrics evaluate(const VerifierModel& model, const std::vector<LabeledVector>& docs,
                 double threshold = 0.5);

/// Labeled feature vectors for one split of a task: positives first, then
/// negatives, each in task order.
std::vector<LabeledVector> labeled_split(const BinaryTask& task, Split split,
                                         const FeatureExtractor& extractor);

/// Test-split evaluation with every positive test document replaced by its
/// paraphrase; negatives are scored verbatim. Throws DataError listing the
/// ids of positives without a paraphrase.
Metrics evaluate_obfuscated(const VerifierModel& model, const BinaryTask& task,
                            const std::map<std::string, std::string>& paraphrased_positives,
                            const FeatureExtractor& extractor, double threshold = 0.5);

std::string model_to_json(const VerifierModel& model);
VerifierModel model_from_json(std::string_view json_text);

}  // namespace obfusc
