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
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "obfusc/config.hpp"

namespace obfusc {

enum class Stage { ingest, extract, train, explain, obfuscate, check, evaluate, diptest, report, all };

std::string_view to_string(Stage s);
/// Throws UserError for an unknown stage name.
Stage stage_from_string(std::string_view s);

struct PipelineOptions {
    bool force = false;
    /// Restricts the run to these users / llm names (empty = all).
    std::vector<std::string> users;
    std::vector<std::string> llms;
    std::ostream* log = nullptr;
    /// Overrides backend construction (tests inject fault servers here).
    std::function<std::shared_ptr<ChatBackend>(const LlmSpec&)> backend_factory;
};

/// Staged, resumable runner. Artifacts live under
///   <output_dir>/work/<run_id>/      stage outputs and <stage>.done markers
///   <output_dir>/results/<run_id>/   run.json, tables.md, tables.csv, manifest.json
///   <output_dir>/cache/              paraphrase caches, shared across runs
/// A stage whose marker matches the current user/llm selection is skipped
/// unless `force` is set.
class Pipeline {
public:
    explicit Pipeline(RunConfig config, PipelineOptions options = {});
    ~Pipeline();

    void run(Stage stage);

    const RunConfig& config() const { return config_; }
    std::filesystem::path work_dir() const;
    std::filesystem::path results_dir() const;
    std::filesystem::path cache_dir() const;

    /// Stages that actually executed (not skipped) since construction.
    const std::vector<Stage>& executed() const { return executed_; }

private:
    struct State;

    void run_one(Stage stage);
    void ingest();
    void extract();
    void train();
    void explain();
    void obfuscate();
    void check();
    void evaluate();
    void diptest();
    void report();

    RunConfig config_;
    PipelineOptions options_;
    std::unique_ptr<State> state_;
    std::vector<Stage> executed_;
};

}  // namespace obfusc
