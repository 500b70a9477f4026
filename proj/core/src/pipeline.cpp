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

#include "obfusc/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/evalreport.hpp"
#include "obfusc/explain.hpp"
#include "obfusc/featurecheck.hpp"
#include "obfusc/hash.hpp"
#include "obfusc/mock_backend.hpp"
#include "obfusc/promptgen.hpp"
#include "obfusc/stats.hpp"
#include "obfusc/stylometry.hpp"
#include "obfusc/tagger.hpp"
#include "parallel.hpp"

#ifndef OBFUSC_VERSION
#define OBFUSC_VERSION "0.0.0"
#endif

namespace obfusc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr Stage kOrder[] = {Stage::ingest,    Stage::extract,  Stage::train,   Stage::explain, Stage::obfuscate,
                            Stage::check,     Stage::evaluate, Stage::diptest, Stage::report};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write-then-rename so an interrupted stage never leaves a torn artifact.
void write_text(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

void require(const fs::path& p, Stage producer) {
    if (!fs::exists(p)) {
        throw DependencyError("missing artifact " + p.string() + " (run `obfusc " +
                              std::string(to_string(producer)) + "` first)");
    }
}

struct UserKey {
    std::string dataset;
    std::string user;
    friend bool operator<(const UserKey& a, const UserKey& b) {
        return std::tie(a.dataset, a.user) < std::tie(b.dataset, b.user);
    }
};

struct Paraphrase {
    std::string dataset;
    std::string user;
    std::string id;
    std::string text;
    std::string prompt_hash;
};

}  // namespace

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::extract: return "extract";
        case Stage::train: return "train";
        case Stage::explain: return "explain";
        case Stage::obfuscate: return "obfuscate";
        case Stage::check: return "check";
        case Stage::evaluate: return "evaluate";
        case Stage::diptest: return "diptest";
        case Stage::report: return "report";
        case Stage::all: return "all";
    }
    return "?";
}

Stage stage_from_string(std::string_view s) {
    for (Stage st : kOrder)
        if (to_string(st) == s) return st;
    if (s == "all") return Stage::all;
    throw UserError("unknown stage '" + std::string(s) + "'");
}

// Lazily loaded inputs shared between stages of one invocation.
struct Pipeline::State {
    std::optional<std::vector<Document>> docs;
    std::unique_ptr<FeatureExtractor> extractor;
    std::optional<std::unordered_map<std::string, FeatureVector>> features;
};

Pipeline::Pipeline(RunConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(std::move(options)), state_(std::make_unique<State>()) {
    config_.validate();
    for (const auto& name : options_.llms) {
        const bool known = std::any_of(config_.llms.begin(), config_.llms.end(),
                                       [&](const LlmSpec& l) { return l.name == name; });
        if (!known) throw UserError("--llm '" + name + "' is not configured");
    }
}

Pipeline::~Pipeline() = default;

fs::path Pipeline::work_dir() const { return config_.resolve(config_.output_dir) / "work" / config_.run_id(); }
fs::path Pipeline::results_dir() const {
    return config_.resolve(config_.output_dir) / "results" / config_.run_id();
}
fs::path Pipeline::cache_dir() const { return config_.resolve(config_.output_dir) / "cache"; }

void Pipeline::run(Stage stage) {
    if (stage != Stage::all) {
        run_one(stage);
        return;
    }
    for (Stage s : kOrder) run_one(s);
}

namespace {

struct Context {
    const RunConfig& cfg;
    const PipelineOptions& opts;
    fs::path work;

    void log(Stage s, const std::string& msg) const {
        if (opts.log) *opts.log << "[" << to_string(s) << "] " << msg << '\n';
    }

    std::vector<const LlmSpec*> llms() const {
        std::vector<const LlmSpec*> out;
        for (const auto& l : cfg.llms) {
            if (opts.llms.empty() || std::count(opts.llms.begin(), opts.llms.end(), l.name)) out.push_back(&l);
        }
        return out;
    }

    std::string marker_content() const {
        auto users = opts.users;
        auto llms = opts.llms;
        std::sort(users.begin(), users.end());
        std::sort(llms.begin(), llms.end());
        return json{{"users", users}, {"llms", llms}}.dump() + "\n";
    }
};

}  // namespace

void Pipeline::run_one(Stage stage) {
    const Context ctx{config_, options_, work_dir()};
    const fs::path marker = ctx.work / (std::string(to_string(stage)) + ".done");
    if (!options_.force && fs::exists(marker) && read_text(marker) == ctx.marker_content()) {
        ctx.log(stage, "up to date, skipping (use --force to rerun)");
        return;
    }
    fs::create_directories(ctx.work);
    switch (stage) {
        case Stage::ingest: ingest(); break;
        case Stage::extract: extract(); break;
        case Stage::train: train(); break;
        case Stage::explain: explain(); break;
        case Stage::obfuscate: obfuscate(); break;
        case Stage::check: check(); break;
        case Stage::evaluate: evaluate(); break;
        case Stage::diptest: diptest(); break;
        case Stage::report: report(); break;
        case Stage::all: break;
    }
    write_text(marker, ctx.marker_content());
    executed_.push_back(stage);
    ctx.log(stage, "done");
}

namespace {

std::vector<Document> load_documents(const fs::path& work) {
    const fs::path p = work / "documents.jsonl";
    require(p, Stage::ingest);
    return load_dataset(p, CorpusFormat::jsonl);
}

std::vector<UserKey> selected_users(const RunConfig& cfg, const PipelineOptions& opts,
                                    const std::vector<Document>& docs) {
    std::set<UserKey> all;
    for (const auto& d : docs) all.insert({d.dataset_id, d.author_id});
    std::vector<UserKey> out;
    for (const auto& ds : cfg.datasets) {
        for (const auto& k : all) {
            if (k.dataset != ds.id) continue;
            auto in = [&](const std::vector<std::string>& filter) {
                return filter.empty() || std::count(filter.begin(), filter.end(), k.user) > 0;
            };
            if (in(cfg.users) && in(opts.users)) out.push_back(k);
        }
    }
    for (const auto* filter : {&cfg.users, &opts.users}) {
        for (const auto& u : *filter) {
            const bool found = std::any_of(all.begin(), all.end(), [&](const UserKey& k) { return k.user == u; });
            if (!found) throw UserError("user '" + u + "' does not occur in any dataset");
        }
    }
    return out;
}

std::vector<Document> docs_of(const std::vector<Document>& docs, const std::string& dataset) {
    std::vector<Document> out;
    for (const auto& d : docs)
        if (d.dataset_id == dataset) out.push_back(d);
    return out;
}

BinaryTask task_for(const RunConfig& cfg, const std::vector<Document>& docs, const UserKey& k) {
    return build_binary_task(k.user, docs_of(docs, k.dataset), cfg.neg_ratio,
                             derive_seed(cfg.seed, "task", k.dataset, k.user));
}

fs::path model_path(const fs::path& work, const UserKey& k) {
    return work / "models" / k.dataset / (k.user + ".json");
}

fs::path paraphrase_path(const fs::path& work, const std::string& llm, std::string_view condition) {
    return work / "paraphrases" / llm / (std::string(condition) + ".jsonl");
}

std::vector<Paraphrase> read_paraphrases(const fs::path& p) {
    require(p, Stage::obfuscate);
    std::vector<Paraphrase> out;
    std::istringstream in(read_text(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        out.push_back({j.at("dataset"), j.at("user"), j.at("id"), j.at("text"), j.at("prompt_hash")});
    }
    return out;
}

std::map<std::string, std::string> paraphrases_for(const std::vector<Paraphrase>& all, const UserKey& k) {
    std::map<std::string, std::string> out;
    for (const auto& p : all)
        if (p.dataset == k.dataset && p.user == k.user) out[p.id] = p.text;
    return out;
}

std::vector<FeatureAttribution> load_attributions(const fs::path& work) {
    const fs::path p = work / "attributions.json";
    require(p, Stage::explain);
    return attributions_from_json(read_text(p));
}

const FeatureAttribution& attribution_for(const std::vector<FeatureAttribution>& all, const UserKey& k) {
    for (const auto& a : all)
        if (a.dataset_id == k.dataset && a.author_id == k.user) return a;
    throw DependencyError("no attribution for " + k.dataset + "/" + k.user + " (run `obfusc explain` first)");
}

VerifierModel load_model(const fs::path& work, const UserKey& k) {
    const fs::path p = model_path(work, k);
    require(p, Stage::train);
    return model_from_json(read_text(p));
}

std::vector<MetricRow> metric_rows_from_json(const std::string& text) {
    std::vector<MetricRow> rows;
    for (const auto& j : json::parse(text)) {
        MetricRow m;
        m.dataset = j.at("dataset");
        m.user = j.at("user");
        m.condition = j.at("condition");
        m.verifier = j.at("verifier");
        m.llm = j.at("llm");
        m.f1 = j.at("f1");
        m.precision = j.at("precision");
        m.recall = j.at("recall");
        rows.push_back(std::move(m));
    }
    return rows;
}

std::string metric_rows_to_json(const std::vector<MetricRow>& rows) {
    json arr = json::array();
    for (const auto& m : rows) {
        arr.push_back({{"dataset", m.dataset},
                       {"user", m.user},
                       {"condition", m.condition},
                       {"verifier", m.verifier},
                       {"llm", m.llm},
                       {"f1", m.f1},
                       {"precision", m.precision},
                       {"recall", m.recall}});
    }
    return arr.dump(2) + "\n";
}

}  // namespace

void Pipeline::ingest() {
    const Context ctx{config_, options_, work_dir()};
    std::vector<Document> docs;
    for (const auto& spec : config_.datasets) {
        auto part = load_dataset(config_.resolve(spec.path), spec.format, spec.id);
        for (auto& d : part) d.dataset_id = spec.id;
        ctx.log(Stage::ingest, spec.id + ": " + std::to_string(part.size()) + " documents");
        docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    std::set<std::string> ids;
    for (const auto& d : docs) {
        if (!ids.insert(d.id).second) throw DataError("document id '" + d.id + "' occurs in two datasets");
    }
    // Splits shipped with the data are kept; otherwise they are assigned here.
    const auto preassigned = std::count_if(docs.begin(), docs.end(),
                                           [](const Document& d) { return d.split != Split::unassigned; });
    if (preassigned == 0) {
        docs = assign_splits(std::move(docs), config_.split_config());
    } else if (static_cast<std::size_t>(preassigned) != docs.size()) {
        throw DataError("some documents carry a split and others do not; assign all or none");
    } else {
        ctx.log(Stage::ingest, "using the splits given in the data");
    }
    write_jsonl(ctx.work / "documents.jsonl", docs);
    // Per-user splits double as the input contract of the transformer plug-in.
    for (const auto& k : selected_users(config_, options_, docs)) {
        write_task_splits(ctx.work / "tasks" / k.dataset / k.user, task_for(config_, docs, k));
    }
    state_->docs = std::move(docs);
}

namespace {

std::unique_ptr<FeatureExtractor> make_extractor(const RunConfig& cfg) {
    FeatureSchema schema =
        cfg.function_words ? make_schema(load_function_words(cfg.resolve(*cfg.function_words))) : default_schema();
    if (cfg.schema_version && *cfg.schema_version != schema.version) {
        throw ConfigError("schema_version '" + *cfg.schema_version + "' does not match the function-word list (" +
                          schema.version + ")");
    }
    std::string tagger = cfg.tagger;
    if (tagger.starts_with("perceptron:")) {
        tagger = "perceptron:" + cfg.resolve(tagger.substr(std::string_view("perceptron:").size())).string();
    }
    return std::make_unique<FeatureExtractor>(std::move(schema), make_tagger(tagger));
}

}  // namespace

void Pipeline::extract() {
    const Context ctx{config_, options_, work_dir()};
    if (!state_->docs) state_->docs = load_documents(ctx.work);
    if (!state_->extractor) state_->extractor = make_extractor(config_);
    const auto& docs = *state_->docs;
    std::vector<std::string> ids(docs.size());
    std::vector<FeatureVector> rows(docs.size());
    detail::parallel_for(docs.size(), static_cast<unsigned>(config_.concurrency), [&](std::size_t i) {
        ids[i] = docs[i].id;
        rows[i] = state_->extractor->extract(docs[i].text);
    });
    write_feature_matrix(ctx.work / "features.csv", state_->extractor->schema(), ids, rows);
    ctx.log(Stage::extract, std::to_string(rows.size()) + " vectors, schema " + state_->extractor->schema().version);
    state_->features.reset();
}

namespace {

const std::unordered_map<std::string, FeatureVector>& features(const fs::path& work, const FeatureSchema& schema,
                                                               std::optional<std::unordered_map<std::string, FeatureVector>>& slot) {
    if (slot) return *slot;
    const fs::path p = work / "features.csv";
    require(p, Stage::extract);
    FeatureMatrix m = read_feature_matrix(p);
    if (m.schema.version != schema.version) {
        throw DependencyError("features.csv uses schema " + m.schema.version + " but the config builds " +
                              schema.version + " (rerun `obfusc extract --force`)");
    }
    slot.emplace();
    for (std::size_t i = 0; i < m.doc_ids.size(); ++i) slot->emplace(m.doc_ids[i], std::move(m.rows[i]));
    return *slot;
}

std::vector<LabeledVector> labeled(const BinaryTask& task, Split split,
                                   const std::unordered_map<std::string, FeatureVector>& feats) {
    std::vector<LabeledVector> out;
    auto add = [&](const Document* d, int label) {
        const auto it = feats.find(d->id);
        if (it == feats.end()) throw DependencyError("features.csv has no row for '" + d->id + "'");
        out.push_back({d->id, it->second, label});
    };
    for (const auto* d : task.positives_in(split)) add(d, 1);
    for (const auto* d : task.negatives_in(split)) add(d, 0);
    return out;
}

}  // namespace

void Pipeline::train() {
    const Context ctx{config_, options_, work_dir()};
    if (!state_->docs) state_->docs = load_documents(ctx.work);
    if (!state_->extractor) state_->extractor = make_extractor(config_);
    const auto& feats = features(ctx.work, state_->extractor->schema(), state_->features);
    const auto users = selected_users(config_, options_, *state_->docs);
    std::vector<std::string> out(users.size());
    detail::parallel_for(users.size(), static_cast<unsigned>(config_.concurrency), [&](std::size_t i) {
        const auto& k = users[i];
        const BinaryTask task = task_for(config_, *state_->docs, k);
        Hyperparams h = config_.logreg;
        h.seed = derive_seed(config_.seed, "train", k.dataset, k.user);
        const TrainResult r = fit_logistic(k.user, labeled(task, Split::train, feats), h);
        out[i] = model_to_json(r.model);
    });
    for (std::size_t i = 0; i < users.size(); ++i) write_text(model_path(ctx.work, users[i]), out[i]);
    ctx.log(Stage::train, std::to_string(users.size()) + " models");
}

void Pipeline::explain() {
    const Context ctx{config_, options_, work_dir()};
    if (!state_->docs) state_->docs = load_documents(ctx.work);
    if (!state_->extractor) state_->extractor = make_extractor(config_);
    const auto& feats = features(ctx.work, state_->extractor->schema(), state_->features);
    std::vector<FeatureAttribution> out;
    for (const auto& k : selected_users(config_, options_, *state_->docs)) {
        const VerifierModel model = load_model(ctx.work, k);
        const BinaryTask task = task_for(config_, *state_->docs, k);
        std::vector<FeatureVector> background;
        for (auto& lv : labeled(task, Split::val, feats)) background.push_back(std::move(lv.features));
        FeatureAttribution a = top_feature(model, state_->extractor->schema(), background);
        a.dataset_id = k.dataset;
        ctx.log(Stage::explain, k.dataset + "/" + k.user + ": " + a.feature_id + " (" +
                                    std::string(to_string(a.prompt_direction)) + ")");
        out.push_back(std::move(a));
    }
    write_text(ctx.work / "attributions.json", attributions_to_json(out) + "\n");
}

void Pipeline::obfuscate() {
    const Context ctx{config_, options_, work_dir()};
    if (!state_->docs) state_->docs = load_documents(ctx.work);
    const auto& docs = *state_->docs;
    const auto users = selected_users(config_, options_, docs);
    const bool personalized =
        std::count(config_.conditions.begin(), config_.conditions.end(), std::string(kConditionPersonalized)) > 0;
    std::vector<FeatureAttribution> attributions;
    if (personalized) attributions = load_attributions(ctx.work);

    PromptTemplates templates = PromptTemplates::defaults();
    if (config_.zero_shot_template || config_.personalized_template) {
        const auto zs = config_.zero_shot_template ? config_.resolve(*config_.zero_shot_template) : fs::path();
        const auto ps = config_.personalized_template ? config_.resolve(*config_.personalized_template) : fs::path();
        const PromptTemplates loaded = PromptTemplates::load(zs, ps);
        if (config_.zero_shot_template) templates.zero_shot = loaded.zero_shot;
        if (config_.personalized_template) templates.personalized = loaded.personalized;
        templates.validate();
    }

    for (const LlmSpec* llm : ctx.llms()) {
        std::shared_ptr<ChatBackend> backend;
        if (options_.backend_factory) backend = options_.backend_factory(*llm);
        if (!backend) {
            backend = llm->mock_rule ? std::shared_ptr<ChatBackend>(mock_backend(*llm->mock_rule))
                                     : std::shared_ptr<ChatBackend>(HttpChatBackend::from_env());
        }
        ParaphraseCache cache(cache_file(cache_dir(), llm->config.model_name));
        GatewayOptions gopts;
        gopts.jitter_seed = derive_seed(config_.seed, "obfuscate", llm->name);
        ParaphraseGateway gateway(llm->config, backend, cache, gopts);

        for (const auto& condition : config_.conditions) {
            struct Job {
                const UserKey* user;
                const Document* doc;
                std::string prompt;
            };
            std::vector<Job> jobs;
            std::vector<BinaryTask> tasks;
            tasks.reserve(users.size());
            for (const auto& k : users) tasks.push_back(task_for(config_, docs, k));
            for (std::size_t u = 0; u < users.size(); ++u) {
                const auto& k = users[u];
                const FeatureAttribution* attr = personalized && condition == kConditionPersonalized
                                                     ? &attribution_for(attributions, k)
                                                     : nullptr;
                for (const auto* d : tasks[u].positives_in(Split::test)) {
                    const PromptSpec spec = attr ? PromptSpec::personalized(attr->display_name, attr->prompt_direction,
                                                                            d->text)
                                                 : PromptSpec::zero_shot(d->text);
                    jobs.push_back({&k, d, render(spec, templates)});
                }
            }
            std::vector<ParaphraseRecord> records(jobs.size());
            detail::parallel_for(jobs.size(), static_cast<unsigned>(config_.concurrency), [&](std::size_t i) {
                records[i] = gateway.paraphrase(jobs[i].prompt, jobs[i].doc->id);
            });

            std::string out;
            std::map<const UserKey*, std::map<std::string, std::string>> by_user;
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                out += json{{"dataset", jobs[i].user->dataset},
                            {"user", jobs[i].user->user},
                            {"id", jobs[i].doc->id},
                            {"text", records[i].output_text},
                            {"prompt_hash", records[i].prompt_hash}}
                           .dump() +
                       "\n";
                by_user[jobs[i].user][jobs[i].doc->id] = records[i].output_text;
            }
            write_text(paraphrase_path(ctx.work, llm->name, condition), out);

            // Obfuscated test splits in the plug-in's input format.
            for (std::size_t u = 0; u < users.size(); ++u) {
                const auto& k = users[u];
                std::string split;
                for (const auto* d : tasks[u].positives_in(Split::test)) {
                    Document copy = *d;
                    copy.text = by_user[&k][d->id];
                    split += document_to_jsonl(copy, 1) + "\n";
                }
                for (const auto* d : tasks[u].negatives_in(Split::test)) split += document_to_jsonl(*d, 0) + "\n";
                write_text(ctx.work / "obfuscated" / k.dataset / k.user / ("test-" + condition + "-" + llm->name + ".jsonl"),
                           split);
            }
            ctx.log(Stage::obfuscate, llm->name + "/" + condition + ": " + std::to_string(jobs.size()) + " paraphrases");
        }
        ctx.log(Stage::obfuscate, llm->name + ": " + std::to_string(gateway.backend_calls()) + " backend calls, " +
                                      std::to_string(gateway.backoffs()) + " backoffs");
    }
}

void Pipeline::check() {
    const Context ctx{config_, options_, work_dir()};
    if (!state_->docs) state_->docs = load_documents(ctx.work);
    if (!state_->extractor) state_->extractor = make_extractor(config_);
    std::vector<ChangeVerdict> verdicts;
    const bool personalized =
        std::count(config_.conditions.begin(), config_.conditions.end(), std::string(kConditionPersonalized)) > 0;
    if (personalized) {
        const auto attributions = load_attributions(ctx.work);
        const auto users = selected_users(config_, options_, *state_->docs);
        for (const LlmSpec* llm : ctx.llms()) {
            const auto paras = read_paraphrases(paraphrase_path(ctx.work, llm->name, kConditionPersonalized));
            for (const auto& k : users) {
                const auto& attr = attribution_for(attributions, k);
                const BinaryTask task = task_for(config_, *state_->docs, k);
                std::vector<std::pair<std::string, std::string>> originals;
                for (const auto* d : task.positives_in(Split::test)) originals.emplace_back(d->id, d->text);
                ChangeVerdict v = verify_change(originals, paraphrases_for(paras, k), attr.feature_id,
                                                attr.prompt_direction, *state_->extractor);
                v.dataset_id = k.dataset;
                v.author_id = k.user;
                v.llm = llm->name;
                ctx.log(Stage::check, llm->name + " " + k.dataset + "/" + k.user + ": " + verdict_label(v));
                verdicts.push_back(std::move(v));
            }
        }
    }
    write_text(ctx.work / "verdicts.json", verdicts_to_json(verdicts) + "\n");
}

void Pipeline::evaluate() {
    const Context ctx{config_, options_, work_dir()};
    if (!state_->docs) state_->docs = load_documents(ctx.work);
    if (!state_->extractor) state_->extractor = make_extractor(config_);
    const auto& feats = features(ctx.work, state_->extractor->schema(), state_->features);
    const auto users = selected_users(config_, options_, *state_->docs);

    std::map<std::pair<std::string, std::string>, std::vector<Paraphrase>> paras;
    for (const LlmSpec* llm : ctx.llms())
        for (const auto& cond : config_.conditions)
            paras[{llm->name, cond}] = read_paraphrases(paraphrase_path(ctx.work, llm->name, cond));

    std::vector<MetricRow> rows;
    for (const auto& k : users) {
        const VerifierModel model = load_model(ctx.work, k);
        const BinaryTask task = task_for(config_, *state_->docs, k);
        const Metrics orig = obfusc::evaluate(model, labeled(task, Split::test, feats), config_.threshold);
        rows.push_back({k.dataset, k.user, std::string(kConditionOriginal), "logreg", std::string(kNoLlm), orig.f1,
                        orig.precision, orig.recall});
        for (const LlmSpec* llm : ctx.llms()) {
            for (const auto& cond : config_.conditions) {
                const Metrics m = evaluate_obfuscated(model, task, paraphrases_for(paras.at({llm->name, cond}), k),
                                                      *state_->extractor, config_.threshold);
                rows.push_back({k.dataset, k.user, cond, "logreg", llm->name, m.f1, m.precision, m.recall});
            }
        }
    }
    if (config_.transformer_results) {
        std::set<UserKey> wanted(users.begin(), users.end());
        for (auto& r : read_transformer_results(config_.resolve(*config_.transformer_results))) {
            if (wanted.count({r.dataset, r.user})) rows.push_back(std::move(r));
        }
    }
    write_text(ctx.work / "metrics.json", metric_rows_to_json(rows));
    ctx.log(Stage::evaluate, std::to_string(rows.size()) + " result rows");
}

void Pipeline::diptest() {
    const Context ctx{config_, options_, work_dir()};
    const fs::path mp = ctx.work / "metrics.json";
    require(mp, Stage::evaluate);
    const ObfuscationRun run = assemble(config_.run_id(), config_.fingerprint(), metric_rows_from_json(read_text(mp)),
                                        {}, {}, {});
    // One test per (verifier, condition, llm) column, pooling every user.
    std::vector<std::tuple<std::string, std::string, std::string>> order;
    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> drops;
    for (const auto& r : run.rows) {
        if (!r.drop) continue;
        const auto key = std::make_tuple(r.metrics.verifier, r.metrics.condition, r.metrics.llm);
        if (!drops.count(key)) order.push_back(key);
        drops[key].push_back(*r.drop);
    }
    std::vector<DipResult> dips;
    for (const auto& key : order) {
        const auto& [verifier, condition, llm] = key;
        const std::uint64_t seed = derive_seed(config_.seed, "diptest", verifier, condition, llm);
        DipResult d = dip_pvalue(drops.at(key), config_.dip_n_boot, seed);
        d.verifier = verifier;
        d.condition = condition;
        d.llm = llm;
        dips.push_back(std::move(d));
    }
    write_text(ctx.work / "dips.json", dips_to_json(dips) + "\n");
    ctx.log(Stage::diptest, std::to_string(dips.size()) + " tests");
}

void Pipeline::report() {
    const Context ctx{config_, options_, work_dir()};
    const fs::path mp = ctx.work / "metrics.json";
    require(mp, Stage::evaluate);
    require(ctx.work / "dips.json", Stage::diptest);
    require(ctx.work / "verdicts.json", Stage::check);
    const ObfuscationRun run =
        assemble(config_.run_id(), config_.fingerprint(), metric_rows_from_json(read_text(mp)),
                 load_attributions(ctx.work), verdicts_from_json(read_text(ctx.work / "verdicts.json")),
                 dips_from_json(read_text(ctx.work / "dips.json")));

    const fs::path out = results_dir();
    write_text(out / "run.json", render(run, ReportFormat::json));
    write_text(out / "tables.md", render(run, ReportFormat::markdown));
    write_text(out / "tables.csv", render(run, ReportFormat::csv));

    json manifest;
    manifest["tool_version"] = OBFUSC_VERSION;
    manifest["run_id"] = run.run_id;
    manifest["config_fingerprint"] = run.config_fingerprint;
    manifest["config"] = json::parse(config_.canonical_json());
    manifest["created_at"] = utc_timestamp();
    manifest["seeds"] = {{"global", config_.seed}, {"split", config_.split_config().seed}};
    json models = json::object();
    if (fs::exists(ctx.work / "models")) {
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(ctx.work / "models"))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) models[fs::relative(f, ctx.work).generic_string()] = sha256_file(f.string());
    }
    manifest["model_files"] = models;
    json caches = json::object();
    for (const auto& l : config_.llms) {
        const fs::path c = cache_file(cache_dir(), l.config.model_name);
        if (fs::exists(c)) caches[l.name] = sha256_file(c.string());
    }
    manifest["cache_files"] = caches;
    json artifacts = json::object();
    for (const char* name : {"documents.jsonl", "features.csv", "attributions.json", "verdicts.json", "metrics.json",
                             "dips.json"}) {
        if (fs::exists(ctx.work / name)) artifacts[name] = sha256_file((ctx.work / name).string());
    }
    manifest["artifacts"] = artifacts;
    manifest["function_words_sha256"] =
        config_.function_words ? sha256_file(config_.resolve(*config_.function_words).string())
                               : default_function_words_sha256();
    write_text(out / "manifest.json", manifest.dump(2) + "\n");
    ctx.log(Stage::report, "wrote " + out.string());
}

}  // namespace obfusc
