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

#include "obfusc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/hash.hpp"
#include "obfusc/mock_backend.hpp"

namespace obfusc {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

void read_path(const json& obj, const char* key, std::optional<std::filesystem::path>& out,
               const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    std::string s;
    read(obj, key, s, where);
    out = s;
}

std::string_view format_name(CorpusFormat f) {
    switch (f) {
        case CorpusFormat::jsonl: return "jsonl";
        case CorpusFormat::csv: return "csv";
        case CorpusFormat::directory: return "directory";
    }
    return "jsonl";
}

}  // namespace

RunConfig RunConfig::from_json(std::string_view text, std::filesystem::path base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"datasets", "split", "neg_ratio", "function_words", "schema_version", "tagger", "logreg",
                    "threshold", "llms", "conditions", "users", "dip", "transformer_results", "prompts",
                    "output_dir", "seed", "concurrency"},
                   "config");
    RunConfig c;
    c.base_dir = std::move(base_dir);

    if (!j.contains("datasets") || !j.at("datasets").is_array()) {
        throw ConfigError("config.datasets must be a list");
    }
    for (const auto& d : j.at("datasets")) {
        reject_unknown(d, {"id", "path", "format"}, "config.datasets[]");
        DatasetSpec ds;
        std::string path, format = "jsonl";
        read(d, "id", ds.id, "datasets[]");
        read(d, "path", path, "datasets[]");
        read(d, "format", format, "datasets[]");
        ds.path = path;
        try {
            ds.format = corpus_format_from_string(format);
        } catch (const UserError& e) {
            throw ConfigError(e.what());
        }
        c.datasets.push_back(std::move(ds));
    }
    if (j.contains("split")) {
        const auto& s = j.at("split");
        reject_unknown(s, {"train", "val", "test"}, "config.split");
        read(s, "train", c.train_frac, "split");
        read(s, "val", c.val_frac, "split");
        read(s, "test", c.test_frac, "split");
    }
    read(j, "neg_ratio", c.neg_ratio, "config");
    read_path(j, "function_words", c.function_words, "config");
    if (j.contains("schema_version") && !j.at("schema_version").is_null()) {
        std::string v;
        read(j, "schema_version", v, "config");
        c.schema_version = v;
    }
    read(j, "tagger", c.tagger, "config");
    if (j.contains("logreg")) {
        const auto& l = j.at("logreg");
        reject_unknown(l, {"l2_lambda", "learning_rate", "max_epochs", "tolerance"}, "config.logreg");
        read(l, "l2_lambda", c.logreg.l2_lambda, "logreg");
        read(l, "learning_rate", c.logreg.learning_rate, "logreg");
        read(l, "max_epochs", c.logreg.max_epochs, "logreg");
        read(l, "tolerance", c.logreg.tolerance, "logreg");
    }
    read(j, "threshold", c.threshold, "config");
    if (j.contains("llms")) {
        for (const auto& l : j.at("llms")) {
            reject_unknown(l,
                           {"name", "mock", "endpoint_url", "model", "temperature", "max_output_tokens",
                            "timeout_s", "max_retries", "requests_per_minute", "max_concurrency",
                            "backoff_base_s", "backoff_factor"},
                           "config.llms[]");
            LlmSpec spec;
            read(l, "name", spec.name, "llms[]");
            if (l.contains("mock")) {
                std::string rule;
                read(l, "mock", rule, "llms[]");
                spec.mock_rule = rule;
                // Mocks never leave the process; the endpoint is a placeholder.
                spec.config.endpoint_url = "http://localhost";
                spec.config.model_name = "mock:" + rule;
                spec.config.requests_per_minute = 1000000;
            }
            auto& lc = spec.config;
            read(l, "endpoint_url", lc.endpoint_url, "llms[]");
            read(l, "model", lc.model_name, "llms[]");
            read(l, "temperature", lc.temperature, "llms[]");
            read(l, "max_output_tokens", lc.max_output_tokens, "llms[]");
            read(l, "timeout_s", lc.timeout_s, "llms[]");
            read(l, "max_retries", lc.max_retries, "llms[]");
            read(l, "requests_per_minute", lc.requests_per_minute, "llms[]");
            read(l, "max_concurrency", lc.max_concurrency, "llms[]");
            read(l, "backoff_base_s", lc.backoff_base_s, "llms[]");
            read(l, "backoff_factor", lc.backoff_factor, "llms[]");
            c.llms.push_back(std::move(spec));
        }
    }
    read(j, "conditions", c.conditions, "config");
    read(j, "users", c.users, "config");
    if (j.contains("dip")) {
        reject_unknown(j.at("dip"), {"n_boot"}, "config.dip");
        read(j.at("dip"), "n_boot", c.dip_n_boot, "dip");
    }
    read_path(j, "transformer_results", c.transformer_results, "config");
    if (j.contains("prompts")) {
        const auto& p = j.at("prompts");
        reject_unknown(p, {"zero_shot", "personalized"}, "config.prompts");
        read_path(p, "zero_shot", c.zero_shot_template, "prompts");
        read_path(p, "personalized", c.personalized_template, "prompts");
    }
    std::string out = c.output_dir.string();
    read(j, "output_dir", out, "config");
    c.output_dir = out;
    read(j, "seed", c.seed, "config");
    read(j, "concurrency", c.concurrency, "config");
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

void RunConfig::validate() const {
    if (datasets.empty()) throw ConfigError("config.datasets is empty");
    std::set<std::string> ids;
    for (const auto& d : datasets) {
        if (d.id.empty()) throw ConfigError("every dataset needs an id");
        if (d.path.empty()) throw ConfigError("dataset '" + d.id + "' has no path");
        if (!ids.insert(d.id).second) throw ConfigError("duplicate dataset id '" + d.id + "'");
    }
    split_config().validate();
    if (!(neg_ratio > 0.0)) throw ConfigError("neg_ratio must be positive");
    if (tagger != "rule" && !tagger.starts_with("perceptron:")) {
        throw ConfigError("tagger must be 'rule' or 'perceptron:<path>'");
    }
    if (!(logreg.l2_lambda >= 0.0) || !(logreg.learning_rate > 0.0) || logreg.max_epochs < 1 ||
        !(logreg.tolerance >= 0.0)) {
        throw ConfigError("logreg hyperparameters out of range");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
    std::set<std::string> names;
    for (const auto& l : llms) {
        if (l.name.empty() || l.name.find_first_of("/\\ -") != std::string::npos) {
            throw ConfigError("llm name '" + l.name + "' must be non-empty without '/', '-' or spaces");
        }
        if (l.name == "none") throw ConfigError("llm name 'none' is reserved");
        if (!names.insert(l.name).second) throw ConfigError("duplicate llm name '" + l.name + "'");
        if (l.mock_rule) {
            MockBackend probe(*l.mock_rule);  // throws ConfigError on a bad rule
            (void)probe;
        } else {
            l.config.validate();
        }
    }
    for (const auto& cond : conditions) {
        if (cond != "zeroshot" && cond != "personalized") {
            throw ConfigError("unknown condition '" + cond + "'");
        }
    }
    if (!conditions.empty() && llms.empty()) throw ConfigError("conditions need at least one llm");
    if (dip_n_boot < 100) throw ConfigError("dip.n_boot must be at least 100");
    if (concurrency < 1) throw ConfigError("concurrency must be at least 1");
}

std::string RunConfig::canonical_json() const {
    json j;
    json ds = json::array();
    for (const auto& d : datasets) {
        ds.push_back({{"id", d.id}, {"path", d.path.generic_string()}, {"format", format_name(d.format)}});
    }
    j["datasets"] = ds;
    j["split"] = {{"train", train_frac}, {"val", val_frac}, {"test", test_frac}};
    j["neg_ratio"] = neg_ratio;
    j["function_words"] = function_words ? json(function_words->generic_string()) : json(nullptr);
    j["schema_version"] = schema_version ? json(*schema_version) : json(nullptr);
    j["tagger"] = tagger;
    j["logreg"] = {{"l2_lambda", logreg.l2_lambda},
                   {"learning_rate", logreg.learning_rate},
                   {"max_epochs", logreg.max_epochs},
                   {"tolerance", logreg.tolerance}};
    j["threshold"] = threshold;
    json ls = json::array();
    for (const auto& l : llms) {
        json o = {{"name", l.name}};
        if (l.mock_rule) {
            o["mock"] = *l.mock_rule;
        } else {
            const auto& c = l.config;
            o.update({{"endpoint_url", c.endpoint_url},
                      {"model", c.model_name},
                      {"temperature", c.temperature},
                      {"max_output_tokens", c.max_output_tokens},
                      {"timeout_s", c.timeout_s},
                      {"max_retries", c.max_retries},
                      {"requests_per_minute", c.requests_per_minute},
                      {"max_concurrency", c.max_concurrency},
                      {"backoff_base_s", c.backoff_base_s},
                      {"backoff_factor", c.backoff_factor}});
        }
        ls.push_back(std::move(o));
    }
    j["llms"] = ls;
    j["conditions"] = conditions;
    j["users"] = users;
    j["dip"] = {{"n_boot", dip_n_boot}};
    j["transformer_results"] =
        transformer_results ? json(transformer_results->generic_string()) : json(nullptr);
    j["prompts"] = {
        {"zero_shot", zero_shot_template ? json(zero_shot_template->generic_string()) : json(nullptr)},
        {"personalized", personalized_template ? json(personalized_template->generic_string()) : json(nullptr)}};
    j["output_dir"] = output_dir.generic_string();
    j["seed"] = seed;
    j["concurrency"] = concurrency;
    return j.dump();
}

std::string RunConfig::fingerprint() const { return sha256_hex(canonical_json()); }

std::string RunConfig::run_id() const { return fingerprint().substr(0, 12); }

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
}

SplitConfig RunConfig::split_config() const {
    SplitConfig s;
    s.train_frac = train_frac;
    s.val_frac = val_frac;
    s.test_frac = test_frac;
    s.seed = derive_seed(seed, "split");
    return s;
}

}  // namespace obfusc
