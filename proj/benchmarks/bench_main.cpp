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

#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "obfusc/rng.hpp"
#include "obfusc/stats.hpp"
#include "obfusc/stylometry.hpp"
#include "obfusc/tagger.hpp"
#include "obfusc/verifier.hpp"

namespace {

using namespace obfusc;

std::string sample_text(int sentences) {
    static const char* pool[] = {"The quick brown fox jumps over the lazy dog.",
                                 "She said, \"I would rather walk to the station!\"",
                                 "In 2021 they moved to Paris; nobody knew why.",
                                 "Could it really be that simple?",
                                 "He waited -- and waited -- until the rain stopped."};
    std::string out;
    for (int i = 0; i < sentences; ++i) {
        out += pool[i % 5];
        out += ' ';
    }
    return out;
}

void BM_Extract(benchmark::State& state) {
    const FeatureExtractor fx(default_schema(), std::make_shared<RuleTagger>());
    const std::string text = sample_text(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fx.extract(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Extract)->Arg(5)->Arg(50)->Arg(500);

void BM_DipStatistic(benchmark::State& state) {
    Rng rng(1);
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (auto& v : x) v = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(dip_statistic(x));
}
BENCHMARK(BM_DipStatistic)->Arg(10)->Arg(100)->Arg(1000);

void BM_DipPValue(benchmark::State& state) {
    Rng rng(2);
    std::vector<double> x(25);
    for (auto& v : x) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(dip_pvalue(x, 2000, 3));
}
BENCHMARK(BM_DipPValue)->Unit(benchmark::kMillisecond);

void BM_FitLogistic(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    std::vector<LabeledVector> data(n);
    for (std::size_t i = 0; i < n; ++i) {
        data[i].doc_id = std::to_string(i);
        data[i].label = static_cast<int>(i % 2);
        data[i].features.schema_version = "bench";
        data[i].features.values.resize(213);
        for (auto& v : data[i].features.values) v = rng.normal() + 0.3 * data[i].label;
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_logistic("a", data, Hyperparams{}));
}
BENCHMARK(BM_FitLogistic)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
