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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "obfusc/error.hpp"
#include "obfusc/rng.hpp"
#include "obfusc/verifier.hpp"
#include "synthetic.hpp"

namespace obfusc {
namespace {

LabeledVector row(std::string id, std::vector<double> x, int label, std::string version = "t") {
    return LabeledVector{std::move(id), FeatureVector{std::move(version), std::move(x)}, label};
}

// Overlapping two-class Gaussian data in d dimensions.
std::vector<LabeledVector> noisy_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledVector> out;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = static_cast<int>(i % 2);
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = rng.normal() * (1.0 + j) + (label ? 0.7 : 0.0) + 3.0 * j;
        out.push_back(row("d" + std::to_string(i), std::move(x), label));
    }
    return out;
}

Hyperparams tight(double lambda) {
    Hyperparams h;
    h.l2_lambda = lambda;
    h.learning_rate = 1.0;
    h.max_epochs = 20000;
    h.tolerance = 1e-15;
    return h;
}

// Independent solver: Newton's method on the same objective (mean log-loss
// + lambda/2 |w|^2, bias unpenalised) over population-standardised columns.
Eigen::VectorXd newton_oracle(const std::vector<LabeledVector>& data, double lambda) {
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto d = static_cast<Eigen::Index>(data.front().features.values.size());
    Eigen::MatrixXd X(n, d + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = data[i].features.values[j];
        X(i, d) = 1.0;
        y(i) = data[i].label;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        const double mu = X.col(j).mean();
        const double sd = std::sqrt((X.col(j).array() - mu).square().mean());
        X.col(j) = (X.col(j).array() - mu) / sd;
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd reg = Eigen::VectorXd::Constant(d + 1, lambda);
    reg(d) = 0.0;
    for (int it = 0; it < 100; ++it) {
        const Eigen::VectorXd p = ((-(X * beta)).array().exp() + 1.0).inverse().matrix();
        Eigen::VectorXd g = X.transpose() * (p - y) / static_cast<double>(n);
        g += reg.cwiseProduct(beta);
        const Eigen::VectorXd wts = p.array() * (1.0 - p.array());
        Eigen::MatrixXd Hs = X.transpose() * wts.asDiagonal() * X / static_cast<double>(n);
        Hs.diagonal() += reg;
        const Eigen::VectorXd step = Hs.ldlt().solve(g);
        beta -= step;
        if (step.norm() < 1e-14) break;
    }
    return beta;
}

TEST(Standardizer, PopulationStdAndFloor) {
    const std::vector<std::vector<double>> rows{{1, 5}, {3, 5}};
    const auto s = Standardizer::fit(rows);
    EXPECT_DOUBLE_EQ(s.means[0], 2.0);
    EXPECT_DOUBLE_EQ(s.stds[0], 1.0);
    EXPECT_DOUBLE_EQ(s.stds[1], kStdFloor);
    const auto z = s.transform(std::vector<double>{3, 5});
    EXPECT_DOUBLE_EQ(z[0], 1.0);
    EXPECT_DOUBLE_EQ(z[1], 0.0);
}

TEST(FitLogistic, SeparableOneDimensional) {
    std::vector<LabeledVector> data;
    for (int i = 0; i < 10; ++i) data.push_back(row("p" + std::to_string(i), {5.0 + i}, 1));
    for (int i = 0; i < 10; ++i) data.push_back(row("n" + std::to_string(i), {-5.0 - i}, 0));
    const auto model = fit_logistic("a", data, Hyperparams{}).model;
    EXPECT_GT(model.weights[0], 0.0);
    EXPECT_DOUBLE_EQ(evaluate(model, data).f1, 1.0);
}

TEST(FitLogistic, MatchesNewtonOracle) {
    const auto data = noisy_data(20, 3, 11);
    const auto result = fit_logistic("a", data, tight(0.1));
    const auto beta = newton_oracle(data, 0.1);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(result.model.weights[j], beta(j), 1e-4) << j;
    EXPECT_NEAR(result.model.bias, beta(3), 1e-4);
}

TEST(FitLogistic, HeavyPenaltyGivesPriorProbability) {
    auto data = noisy_data(30, 2, 5);
    data.push_back(row("extra", {0.0, 0.0}, 1));  // 16 positives of 31
    const auto model = fit_logistic("a", data, tight(1e6)).model;
    for (double w : model.weights) EXPECT_NEAR(w, 0.0, 1e-5);
    EXPECT_NEAR(predict_proba(model, data.front().features), 16.0 / 31.0, 1e-4);
}

TEST(FitLogistic, LossIsNonIncreasing) {
    const auto result = fit_logistic("a", noisy_data(40, 4, 3), Hyperparams{});
    ASSERT_GE(result.loss_history.size(), 2u);
    for (std::size_t i = 1; i < result.loss_history.size(); ++i)
        EXPECT_LE(result.loss_history[i], result.loss_history[i - 1]);
    EXPECT_GT(result.epochs_run, 0);
}

TEST(FitLogistic, InvariantToPositiveAffineColumnRescale) {
    const auto data = noisy_data(30, 3, 9);
    auto scaled = data;
    for (auto& r : scaled) r.features.values[1] = 250.0 * r.features.values[1] - 17.0;
    const auto a = fit_logistic("a", data, Hyperparams{}).model;
    const auto b = fit_logistic("a", scaled, Hyperparams{}).model;
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.weights[j], b.weights[j], 1e-9);
    for (std::size_t i = 0; i < data.size(); ++i)
        EXPECT_NEAR(predict_proba(a, data[i].features), predict_proba(b, scaled[i].features), 1e-9);
}

TEST(FitLogistic, Errors) {
    EXPECT_THROW(fit_logistic("a", {}, Hyperparams{}), DataError);
    EXPECT_THROW(fit_logistic("a", {row("x", {1}, 1), row("y", {2}, 1)}, Hyperparams{}), DataError);
    const std::vector<LabeledVector> ok{row("x", {1}, 1), row("y", {2}, 0)};
    Hyperparams bad;
    bad.learning_rate = 0;
    EXPECT_THROW(fit_logistic("a", ok, bad), ConfigError);
    bad = Hyperparams{};
    bad.l2_lambda = -1;
    EXPECT_THROW(fit_logistic("a", ok, bad), ConfigError);
    EXPECT_THROW(fit_logistic("a", {row("x", {1}, 1), row("y", {2}, 0, "other")}, Hyperparams{}), SchemaMismatch);
    EXPECT_THROW(fit_logistic("a", {row("x", {1}, 1), row("y", {2, 3}, 0)}, Hyperparams{}), SchemaMismatch);
}

TEST(FitLogistic, NonFiniteLossIsReported) {
    const std::vector<LabeledVector> data{row("x", {1e308}, 1), row("y", {-1e308}, 0),
                                          row("z", {std::nan("")}, 0)};
    try {
        fit_logistic("a", data, Hyperparams{});
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
    }
}

TEST(Predict, SigmoidAndSymmetry) {
    VerifierModel m;
    m.schema_version = "t";
    m.standardizer.means = {0.0};
    m.standardizer.stds = {1.0};
    m.weights = {1.0};
    m.bias = 0.0;
    const FeatureVector x{"t", {2.0}};
    EXPECT_NEAR(predict_proba(m, x), 0.8807970779778823, 1e-15);
    VerifierModel neg = m;
    neg.weights = {-1.0};
    EXPECT_NEAR(predict_proba(m, x) + predict_proba(neg, x), 1.0, 1e-15);
    // Monotone in the margin.
    double prev = 0.0;
    for (double v = -30; v <= 30; v += 0.5) {
        const double p = predict_proba(m, FeatureVector{"t", {v}});
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, 1.0);
        EXPECT_GE(p, prev);
        prev = p;
    }
    EXPECT_THROW(predict_proba(m, FeatureVector{"u", {1.0}}), SchemaMismatch);
    EXPECT_THROW(predict_proba(m, FeatureVector{"t", {1.0, 2.0}}), SchemaMismatch);
}

TEST(Metrics, FromCounts) {
    const auto m = metrics_from_counts(1, 1, 1, 0);
    EXPECT_DOUBLE_EQ(m.precision, 0.5);
    EXPECT_DOUBLE_EQ(m.recall, 0.5);
    EXPECT_DOUBLE_EQ(m.f1, 0.5);
    const auto z = metrics_from_counts(0, 0, 3, 3);
    EXPECT_EQ(z.precision, 0.0);
    EXPECT_EQ(z.f1, 0.0);
    const auto p = metrics_from_counts(8, 2, 0, 10);
    EXPECT_DOUBLE_EQ(p.f1, 2 * 0.8 / 1.8);
    EXPECT_THROW(evaluate(VerifierModel{}, {}), DataError);
}

TEST(Metrics, ThresholdIsInclusive) {
    VerifierModel m;
    m.schema_version = "t";
    m.standardizer.means = {0.0};
    m.standardizer.stds = {1.0};
    m.weights = {1.0};
    const std::vector<LabeledVector> docs{row("a", {0.0}, 1)};  // p = 0.5 exactly
    EXPECT_EQ(evaluate(m, docs, 0.5).tp, 1u);
    EXPECT_EQ(evaluate(m, docs, 0.6).fn, 1u);
}

TEST(ModelJson, RoundTrip) {
    const auto model = fit_logistic("alice", noisy_data(20, 3, 1), Hyperparams{}).model;
    const auto back = model_from_json(model_to_json(model));
    EXPECT_EQ(back.author_id, "alice");
    EXPECT_EQ(back.schema_version, model.schema_version);
    EXPECT_EQ(back.weights, model.weights);
    EXPECT_EQ(back.bias, model.bias);
    EXPECT_EQ(back.standardizer.means, model.standardizer.means);
    EXPECT_EQ(back.standardizer.stds, model.standardizer.stds);
    EXPECT_EQ(back.train_fingerprint, model.train_fingerprint);
    EXPECT_EQ(model_to_json(back), model_to_json(model));
    EXPECT_THROW(model_from_json("{"), DataError);
    EXPECT_THROW(model_from_json("{}"), DataError);
}

class TaskTest : public ::testing::Test {
protected:
    void SetUp() override {
        SplitConfig cfg;
        cfg.seed = 3;
        auto docs = assign_splits(testing::synthetic_corpus({.docs_per_author = 30}), cfg);
        task_ = build_binary_task(testing::kPlantedAuthor, docs, 1.0, 4);
    }
    BinaryTask task_;
    FeatureExtractor fx_{default_schema(), std::make_shared<RuleTagger>()};
};

TEST_F(TaskTest, TrainAndEvaluateOnSyntheticCorpus) {
    const auto model = train(task_, fx_, Hyperparams{});
    EXPECT_EQ(model.author_id, testing::kPlantedAuthor);
    EXPECT_EQ(model.weights.size(), default_schema().size());
    const auto test = labeled_split(task_, Split::test, fx_);
    ASSERT_FALSE(test.empty());
    EXPECT_EQ(test.front().label, 1);
    EXPECT_EQ(test.back().label, 0);
    EXPECT_GE(evaluate(model, test).f1, 0.95);
}

TEST_F(TaskTest, ObfuscatedEvaluationWithIdentityParaphrases) {
    const auto model = train(task_, fx_, Hyperparams{});
    std::map<std::string, std::string> same;
    for (const auto* d : task_.positives_in(Split::test)) same[d->id] = d->text;
    const auto a = evaluate(model, labeled_split(task_, Split::test, fx_));
    const auto b = evaluate_obfuscated(model, task_, same, fx_);
    EXPECT_EQ(a.tp, b.tp);
    EXPECT_EQ(a.fp, b.fp);
    EXPECT_EQ(a.fn, b.fn);
    EXPECT_EQ(a.f1, b.f1);

    const std::string dropped = same.begin()->first;
    same.erase(same.begin());
    try {
        evaluate_obfuscated(model, task_, same, fx_);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(dropped), std::string::npos);
    }
}

}  // namespace
}  // namespace obfusc
