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

// obfusc <stage> --config run.json [--force] [--users a,b] [--llm name]
// Exit status: 0 success, 1 user error (bad config, missing inputs or
// artifacts), 2 internal error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "obfusc/error.hpp"
#include "obfusc/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Authorship obfuscation evaluation pipeline"};
    app.set_version_flag("--version", std::string(OBFUSC_VERSION));

    std::string stage_name;
    std::string config_path;
    bool force = false;
    bool quiet = false;
    std::vector<std::string> users;
    std::vector<std::string> llms;
    app.add_option("stage", stage_name,
                   "ingest | extract | train | explain | obfuscate | check | evaluate | diptest | report | all")
        ->required();
    app.add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
    app.add_flag("-f,--force", force, "Rerun stages that are already complete");
    app.add_option("--users", users, "Only these users")->delimiter(',');
    app.add_option("--llm", llms, "Only these configured backends")->delimiter(',');
    app.add_flag("-q,--quiet", quiet, "No progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const obfusc::Stage stage = obfusc::stage_from_string(stage_name);
        obfusc::PipelineOptions opts;
        opts.force = force;
        opts.users = users;
        opts.llms = llms;
        opts.log = quiet ? nullptr : &std::cerr;
        obfusc::Pipeline pipeline(obfusc::RunConfig::load(config_path), std::move(opts));
        pipeline.run(stage);
        return 0;
    } catch (const obfusc::UserError& e) {
        std::cerr << "obfusc: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "obfusc: internal error: " << e.what() << '\n';
        return 2;
    }
}
