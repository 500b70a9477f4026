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

#include <cmath>
#include <numeric>

#include "obfusc/error.hpp"
#include "obfusc/explain.hpp"
#include "obfusc/rng.hpp"

namespace obfusc {
namespace {

VerifierModel random_model(std::size_t d, Rng& rng) {
    VerifierModel m;
    m.author_id = "a";
    m.schema_version = "t";
    for (std::size_t j = 0; j < d; ++j) {
        m.standardizer.means.push_back(rng.normal());
        m.standardizer.stds.push_back(0.5 + rng.uniform());
        m.weights.push_back(rng.normal());
    }
    m.bias = rng.normal();
    return m;
}

std::vector<FeatureVector> random_rows(std::size_t n, std::size_t d, Rng& rng) {
    std::vector<FeatureVector> out(n, FeatureVector{"t", {}});
    for (auto& r : out)
        for (std::size_t j = 0; j < d; ++j) r.values.push_back(rng.normal() * 2.0);
    return out;
}

// Interventional value of coalition S: expected margin with the features in
// S fixed to x and the rest drawn from the background rows.
double coalition_value(const VerifierModel& m, const std::vector<FeatureVector>& bg,
                       const FeatureVector& x, unsigned mask) {
    double total = 0.0;
    for (const auto& b : bg) {
        FeatureVector mixed = b;
        for (std::size_t j = 0; j < x.values.size(); ++j)
            if (mask & (1u << j)) mixed.values[j] = x.values[j];
        total += m.margin(mixed);
    }
    return total / static_cast<double>(bg.size());
}

// Exact Shapley values by enumerating every coalition.
std::vector<double> brute_force_shapley(const VerifierModel& m, const std::vector<FeatureVector>& bg,
                                        const FeatureVector& x) {
    const std::size_t d = x.values.size();
    std::vector<double> fact(d + 1, 1.0);
    for (std::size_t k = 1; k <= d; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
    std::vector<double> phi(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            if (mask & (1u << i)) continue;
            const auto s = static_cast<std::size_t>(__builtin_popcount(mask));
            const double weight = fact[s] * fact[d - s - 1] / fact[d];
            phi[i] += weight * (coalition_value(m, bg, x, mask | (1u << i)) - coalition_value(m, bg, x, mask));
        }
    }
    return phi;
}

TEST(LinearShap, MatchesCoalitionEnumeration) {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = random_model(4, rng);
        const auto bg = random_rows(7, 4, rng);
        const auto x = random_rows(1, 4, rng).front();
        const auto phi = linear_shap(model, bg, x);
        const auto oracle = brute_force_shapley(model, bg, x);
        for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(phi[j], oracle[j], 1e-10) << trial << "/" << j;
    }
}

TEST(LinearShap, LocalAccuracy) {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto model = random_model(6, rng);
        const auto rows = random_rows(12, 6, rng);
        const auto m = shap_matrix(model, rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double sum = std::accumulate(m.rows[i].begin(), m.rows[i].end(), m.base_value);
            EXPECT_NEAR(sum, model.margin(rows[i]), 1e-9);
        }
    }
}

TEST(LinearShap, ZeroWeightsAndMeanInput) {
    Rng rng(8);
    auto model = random_model(3, rng);
    const auto bg = random_rows(5, 3, rng);
    model.weights[1] = 0.0;
    const auto x = random_rows(1, 3, rng).front();
    EXPECT_EQ(linear_shap(model, bg, x)[1], 0.0);

    FeatureVector mean{"t", std::vector<double>(3, 0.0)};
    for (const auto& b : bg)
        for (std::size_t j = 0; j < 3; ++j) mean.values[j] += b.values[j] / 5.0;
    for (double v : linear_shap(model, bg, mean)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(LinearShap, Errors) {
    Rng rng(2);
    const auto model = random_model(3, rng);
    EXPECT_THROW(linear_shap(model, {}, FeatureVector{"t", {1, 2, 3}}), DataError);
    const auto bg = random_rows(3, 3, rng);
    EXPECT_THROW(linear_shap(model, bg, FeatureVector{"u", {1, 2, 3}}), SchemaMismatch);
    EXPECT_THROW(linear_shap(model, bg, FeatureVector{"t", {1, 2}}), SchemaMismatch);
    EXPECT_THROW(mean_abs_shap(model, {}), DataError);
}

class TopFeature : public ::testing::Test {
protected:
    void SetUp() override {
        schema_ = default_schema();
        model_.author_id = "a";
        model_.schema_version = schema_.version;
        model_.standardizer.means.assign(schema_.size(), 0.0);
        model_.standardizer.stds.assign(schema_.size(), 1.0);
        model_.weights.assign(schema_.size(), 0.0);
        Rng rng(5);
        for (int i = 0; i < 10; ++i) {
            FeatureVector v{schema_.version, {}};
            for (std::size_t j = 0; j < schema_.size(); ++j) v.values.push_back(rng.normal());
            validation_.push_back(std::move(v));
        }
    }
    std::size_t idx(std::string_view id) const { return *schema_.index_of(id); }

    FeatureSchema schema_;
    VerifierModel model_;
    std::vector<FeatureVector> validation_;
};

TEST_F(TopFeature, PositiveWeightAsksForDecrease) {
    model_.weights[idx("punct_dquote")] = 2.0;
    const auto a = top_feature(model_, schema_, validation_);
    EXPECT_EQ(a.feature_id, "punct_dquote");
    EXPECT_EQ(a.display_name, "double quotation marks");
    EXPECT_EQ(a.weight_sign, WeightSign::positive);
    EXPECT_EQ(a.prompt_direction, Direction::decrease);
    EXPECT_GT(a.mean_abs_shap, 0.0);
}

TEST_F(TopFeature, NegativeWeightAsksForIncrease) {
    model_.weights[idx("pos_SPACE")] = -0.5;
    model_.weights[idx("fw_the")] = 0.01;
    const auto a = top_feature(model_, schema_, validation_);
    EXPECT_EQ(a.feature_id, "pos_SPACE");
    EXPECT_EQ(a.weight_sign, WeightSign::negative);
    EXPECT_EQ(a.prompt_direction, Direction::increase);
}

TEST_F(TopFeature, TiesGoToEarlierEntry) {
    model_.weights[idx("punct_dquote")] = 1.0;
    model_.weights[idx("digit_pct")] = 1.0;
    for (auto& v : validation_) v.values[idx("punct_dquote")] = v.values[idx("digit_pct")];
    EXPECT_EQ(top_feature(model_, schema_, validation_).feature_id, "digit_pct");
}

TEST_F(TopFeature, DuplicatedValidationSetGivesSameRanking) {
    model_.weights[idx("avg_word_length")] = 0.3;
    model_.weights[idx("punct_comma")] = -0.2;
    auto doubled = validation_;
    doubled.insert(doubled.end(), validation_.begin(), validation_.end());
    const auto a = mean_abs_shap(model_, validation_);
    const auto b = mean_abs_shap(model_, doubled);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
    EXPECT_EQ(top_feature(model_, schema_, validation_).feature_id,
              top_feature(model_, schema_, doubled).feature_id);
}

TEST_F(TopFeature, SchemaMismatch) {
    model_.schema_version = "other";
    EXPECT_THROW(top_feature(model_, schema_, validation_), SchemaMismatch);
}

TEST(Attributions, JsonRoundTrip) {
    FeatureAttribution a{"blog", "alice", "punct_exclam", "exclamation marks", 0.75, WeightSign::positive,
                         Direction::decrease};
    FeatureAttribution b{"blog", "bob", "pos_SPACE", "whitespace", 0.1, WeightSign::negative, Direction::increase};
    const auto back = attributions_from_json(attributions_to_json({a, b}));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].feature_id, "punct_exclam");
    EXPECT_EQ(back[0].mean_abs_shap, 0.75);
    EXPECT_EQ(back[1].prompt_direction, Direction::increase);
    EXPECT_EQ(back[1].weight_sign, WeightSign::negative);
    EXPECT_EQ(back[1].dataset_id, "blog");
    EXPECT_THROW(attributions_from_json("[{\"user\": 1}]"), DataError);
    EXPECT_THROW(direction_from_string("sideways"), DataError);
}

}  // namespace
}  // namespace obfusc
