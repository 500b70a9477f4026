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

#include "obfusc/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/hash.hpp"

namespace obfusc {

using nlohmann::json;

Standardizer Standardizer::fit(std::span<const std::vector<double>> rows) {
    Standardizer s;
    if (rows.empty()) return s;
    const std::size_t d = rows.front().size();
    s.means.assign(d, 0.0);
    s.stds.assign(d, 0.0);
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) s.means[j] += r[j];
    for (auto& m : s.means) m /= n;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) s.stds[j] += (r[j] - s.means[j]) * (r[j] - s.means[j]);
    for (auto& v : s.stds) v = std::max(std::sqrt(v / n), kStdFloor);
    return s;
}

std::vector<double> Standardizer::transform(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - means[j]) / stds[j];
    return z;
}

double VerifierModel::margin(const FeatureVector& x) const {
    if (x.schema_version != schema_version) {
        throw SchemaMismatch("model for '" + author_id + "' expects schema " + schema_version +
                             ", got " + x.schema_version);
    }
    if (x.values.size() != weights.size()) {
        throw SchemaMismatch("model for '" + author_id + "' expects " +
                             std::to_string(weights.size()) + " features, got " +
                             std::to_string(x.values.size()));
    }
    double m = bias;
    for (std::size_t j = 0; j < weights.size(); ++j)
        m += weights[j] * (x.values[j] - standardizer.means[j]) / standardizer.stds[j];
    return m;
}

namespace {

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
    return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct Objective {
    const std::vector<std::vector<double>>& z;
    const std::vector<int>& y;
    double lambda;

    double value(const std::vector<double>& w, double b) const {
        double loss = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double m = b;
            for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * z[i][j];
            loss += softplus_neg(y[i] == 1 ? m : -m);
        }
        loss /= static_cast<double>(z.size());
        double reg = 0.0;
        for (double v : w) reg += v * v;
        return loss + 0.5 * lambda * reg;
    }

    // Gradient of the data term only.
    void data_gradient(const std::vector<double>& w, double b, std::vector<double>& gw,
                       double& gb) const {
        std::fill(gw.begin(), gw.end(), 0.0);
        gb = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            double m = b;
            for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * z[i][j];
            const double r = sigmoid(m) - static_cast<double>(y[i]);
            for (std::size_t j = 0; j < w.size(); ++j) gw[j] += r * z[i][j];
            gb += r;
        }
        const double n = static_cast<double>(z.size());
        for (auto& g : gw) g /= n;
        gb /= n;
    }
};

std::string fingerprint(const std::vector<LabeledVector>& data, const Hyperparams& h) {
    std::string key;
    for (const auto& d : data) key += d.doc_id + ':' + std::to_string(d.label) + ';';
    key += json{{"l2", h.l2_lambda}, {"lr", h.learning_rate}, {"epochs", h.max_epochs},
                {"tol", h.tolerance}, {"seed", h.seed}}
               .dump();
    if (!data.empty()) key += data.front().features.schema_version;
    return sha256_hex(key);
}

}  // namespace

TrainResult fit_logistic(std::string author_id, const std::vector<LabeledVector>& data,
                         const Hyperparams& hyper) {
    if (data.empty()) throw DataError("no training data for '" + author_id + "'");
    const bool has_pos = std::any_of(data.begin(), data.end(), [](const auto& d) { return d.label == 1; });
    const bool has_neg = std::any_of(data.begin(), data.end(), [](const auto& d) { return d.label == 0; });
    if (!has_pos || !has_neg) {
        throw DataError("training data for '" + author_id + "' contains a single class");
    }
    if (!(hyper.learning_rate > 0) || !(hyper.l2_lambda >= 0) || hyper.max_epochs < 0) {
        throw ConfigError("invalid logistic-regression hyperparameters");
    }
    const std::string& version = data.front().features.schema_version;
    std::vector<std::vector<double>> raw;
    raw.reserve(data.size());
    std::vector<int> y;
    for (const auto& d : data) {
        if (d.features.schema_version != version || d.features.values.size() != data.front().features.values.size()) {
            throw SchemaMismatch("training rows mix feature schemas");
        }
        raw.push_back(d.features.values);
        y.push_back(d.label == 1 ? 1 : 0);
    }

    TrainResult result;
    VerifierModel& model = result.model;
    model.author_id = std::move(author_id);
    model.schema_version = version;
    model.hyperparams = hyper;
    model.standardizer = Standardizer::fit(raw);
    model.train_fingerprint = fingerprint(data, hyper);

    std::vector<std::vector<double>> z;
    z.reserve(raw.size());
    for (const auto& r : raw) z.push_back(model.standardizer.transform(r));

    const std::size_t d = raw.front().size();
    std::vector<double> w(d, 0.0), gw(d), w_next(d);
    double b = 0.0, gb = 0.0;
    const Objective obj{z, y, hyper.l2_lambda};
    double loss = obj.value(w, b);
    result.loss_history.push_back(loss);
    double step = hyper.learning_rate;

    for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
        result.epochs_run = epoch;
        obj.data_gradient(w, b, gw, gb);
        const double shrink = 1.0 + step * hyper.l2_lambda;
        for (std::size_t j = 0; j < d; ++j) w_next[j] = (w[j] - step * gw[j]) / shrink;
        const double b_next = b - step * gb;
        const double next_loss = obj.value(w_next, b_next);
        if (!std::isfinite(next_loss)) {
            throw NumericalError("non-finite training loss for '" + model.author_id + "' at epoch " +
                                 std::to_string(epoch));
        }
        if (next_loss > loss) {
            step *= 0.5;
            if (step < 1e-12) break;
            continue;
        }
        const double decrease = loss - next_loss;
        w.swap(w_next);
        b = b_next;
        loss = next_loss;
        result.loss_history.push_back(loss);
        if (decrease < hyper.tolerance) break;
    }
    model.weights = std::move(w);
    model.bias = b;
    return result;
}

std::vector<LabeledVector> labeled_split(const BinaryTask& task, Split split,
                                         const FeatureExtractor& extractor) {
    std::vector<LabeledVector> out;
    for (const auto* d : task.positives_in(split)) out.push_back({d->id, extractor.extract(d->text), 1});
    for (const auto* d : task.negatives_in(split)) out.push_back({d->id, extractor.extract(d->text), 0});
    return out;
}

VerifierModel train(const BinaryTask& task, const FeatureExtractor& extractor,
                    const Hyperparams& hyper) {
    return fit_logistic(task.target_author, labeled_split(task, Split::train, extractor), hyper).model;
}

double predict_proba(const VerifierModel& model, const FeatureVector& x) {
    const double p = sigmoid(model.margin(x));
    return std::clamp(p, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn,
                            double threshold) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    m.threshold = threshold;
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0
                                         : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

Metrics evaluate(const VerifierModel& model, const std::vector<LabeledVector>& docs, double threshold) {
    if (docs.empty()) throw DataError("evaluation set is empty");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& d : docs) {
        const bool predicted = predict_proba(model, d.features) >= threshold;
        if (d.label == 1) (predicted ? tp : fn) += 1;
        else (predicted ? fp : tn) += 1;
    }
    return metrics_from_counts(tp, fp, fn, tn, threshold);
}

Metrics evaluate_obfuscated(const VerifierModel& model, const BinaryTask& task,
                            const std::map<std::string, std::string>& paraphrased_positives,
                            const FeatureExtractor& extractor, double threshold) {
    std::vector<LabeledVector> docs;
    std::string missing;
    for (const auto* d : task.positives_in(Split::test)) {
        const auto it = paraphrased_positives.find(d->id);
        if (it == paraphrased_positives.end()) {
            missing += (missing.empty() ? "" : ", ") + d->id;
            continue;
        }
        docs.push_back({d->id, extractor.extract(it->second), 1});
    }
    if (!missing.empty()) throw DataError("missing paraphrases for: " + missing);
    for (const auto* d : task.negatives_in(Split::test)) docs.push_back({d->id, extractor.extract(d->text), 0});
    return evaluate(model, docs, threshold);
}

std::string model_to_json(const VerifierModel& m) {
    const json doc{{"author_id", m.author_id},
                   {"schema_version", m.schema_version},
                   {"means", m.standardizer.means},
                   {"stds", m.standardizer.stds},
                   {"weights", m.weights},
                   {"bias", m.bias},
                   {"hyperparams",
                    {{"l2_lambda", m.hyperparams.l2_lambda},
                     {"learning_rate", m.hyperparams.learning_rate},
                     {"max_epochs", m.hyperparams.max_epochs},
                     {"tolerance", m.hyperparams.tolerance},
                     {"seed", m.hyperparams.seed}}},
                   {"train_fingerprint", m.train_fingerprint}};
    return doc.dump(2);
}

VerifierModel model_from_json(std::string_view json_text) {
    try {
        const json doc = json::parse(json_text);
        VerifierModel m;
        m.author_id = doc.at("author_id").get<std::string>();
        m.schema_version = doc.at("schema_version").get<std::string>();
        m.standardizer.means = doc.at("means").get<std::vector<double>>();
        m.standardizer.stds = doc.at("stds").get<std::vector<double>>();
        m.weights = doc.at("weights").get<std::vector<double>>();
        m.bias = doc.at("bias").get<double>();
        const json& h = doc.at("hyperparams");
        m.hyperparams.l2_lambda = h.at("l2_lambda").get<double>();
        m.hyperparams.learning_rate = h.at("learning_rate").get<double>();
        m.hyperparams.max_epochs = h.at("max_epochs").get<int>();
        m.hyperparams.tolerance = h.at("tolerance").get<double>();
        m.hyperparams.seed = h.at("seed").get<std::uint64_t>();
        m.train_fingerprint = doc.at("train_fingerprint").get<std::string>();
        if (m.weights.size() != m.standardizer.means.size() ||
            m.weights.size() != m.standardizer.stds.size()) {
            throw DataError("model file has inconsistent vector lengths");
        }
        for (double v : m.weights)
            if (!std::isfinite(v)) throw DataError("model file has non-finite weights");
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model JSON: ") + e.what());
    }
}

}  // namespace obfusc
