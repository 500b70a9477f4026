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

#include "obfusc/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "obfusc/error.hpp"

namespace obfusc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Key = std::tuple<std::string, std::string, std::string, std::string, std::string>;

Key key_of(const MetricRow& m) { return {m.dataset, m.user, m.verifier, m.condition, m.llm}; }

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
void push_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ObfuscationRun assemble(std::string run_id, std::string config_fingerprint,
                        std::vector<MetricRow> metrics,
                        std::vector<FeatureAttribution> attributions,
                        std::vector<ChangeVerdict> verdicts, std::vector<DipResult> dips) {
    std::map<Key, std::size_t> seen;
    std::map<std::tuple<std::string, std::string, std::string>, double> originals;
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        const auto& m = metrics[i];
        if (!seen.emplace(key_of(m), i).second) {
            throw DataError("duplicate result row for " + m.dataset + "/" + m.user + " " + m.verifier + " " +
                            m.condition + " " + m.llm);
        }
        if (m.condition == kConditionOriginal) originals[{m.dataset, m.user, m.verifier}] = m.f1;
    }
    ObfuscationRun run;
    run.run_id = std::move(run_id);
    run.config_fingerprint = std::move(config_fingerprint);
    for (auto& m : metrics) {
        ResultRow row;
        if (m.condition != kConditionOriginal) {
            const auto it = originals.find({m.dataset, m.user, m.verifier});
            if (it == originals.end()) {
                throw DataError("no original " + m.verifier + " row for " + m.dataset + "/" + m.user);
            }
            row.drop = performance_drop(it->second, m.f1);
            row.ineffective = is_ineffective(*row.drop);
        }
        row.metrics = std::move(m);
        run.rows.push_back(std::move(row));
    }
    run.attributions = std::move(attributions);
    run.verdicts = std::move(verdicts);
    run.dips = std::move(dips);
    return run;
}

std::vector<ColumnAverage> column_averages(const ObfuscationRun& run) {
    // Column key: (verifier, condition, llm); group: dataset or "".
    using ColKey = std::tuple<std::string, std::string, std::string, std::string>;
    std::vector<ColKey> order;
    std::map<ColKey, std::tuple<double, double, std::size_t, bool>> acc;
    auto add = [&](const std::string& ds, const ResultRow& r) {
        const ColKey k{ds, r.metrics.verifier, r.metrics.condition, r.metrics.llm};
        auto [it, fresh] = acc.try_emplace(k, 0.0, 0.0, 0, r.drop.has_value());
        if (fresh) order.push_back(k);
        std::get<0>(it->second) += r.metrics.f1;
        std::get<1>(it->second) += r.drop.value_or(0.0);
        ++std::get<2>(it->second);
    };
    for (const auto& r : run.rows) add(r.metrics.dataset, r);
    for (const auto& r : run.rows) add("", r);
    std::vector<ColumnAverage> out;
    for (const auto& k : order) {
        const auto& [f1, drop, n, has_drop] = acc.at(k);
        ColumnAverage a;
        std::tie(a.dataset, a.verifier, a.condition, a.llm) = k;
        a.users = n;
        a.f1 = f1 / static_cast<double>(n);
        if (has_drop) a.drop = drop / static_cast<double>(n);
        out.push_back(std::move(a));
    }
    return out;
}

ReportFormat report_format_from_string(std::string_view s) {
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw ConfigError("unknown report format '" + std::string(s) + "'");
}

namespace {

std::string render_markdown(const ObfuscationRun& run) {
    std::ostringstream md;
    md << "# Obfuscation results\n\n";
    md << "Run `" << run.run_id << "`, config `" << run.config_fingerprint << "`\n";

    std::vector<std::string> verifiers;
    for (const auto& r : run.rows) push_unique(verifiers, r.metrics.verifier);
    if (verifiers.empty()) {
        md << "\n## Verifier F1\n\n| Dataset | User | Original |\n|---|---|---|\n";
    }
    const auto averages = column_averages(run);
    for (const auto& ver : verifiers) {
        std::vector<std::pair<std::string, std::string>> cols;  // (condition, llm)
        std::vector<std::string> datasets;
        std::vector<std::pair<std::string, std::string>> users;
        std::map<std::tuple<std::string, std::string, std::string, std::string>, const ResultRow*> cell;
        for (const auto& r : run.rows) {
            const auto& m = r.metrics;
            if (m.verifier != ver) continue;
            if (m.condition != kConditionOriginal) push_unique(cols, {m.condition, m.llm});
            push_unique(datasets, m.dataset);
            push_unique(users, {m.dataset, m.user});
            cell[{m.dataset, m.user, m.condition, m.llm}] = &r;
        }
        md << "\n## Verifier F1 (" << ver << ")\n\n| Dataset | User | Original |";
        for (const auto& [cond, llm] : cols) md << ' ' << cond << " (" << llm << ") | Drop |";
        md << "\n|---|---|---|";
        for (std::size_t i = 0; i < cols.size(); ++i) md << "---|---|";
        md << '\n';

        auto avg_cell = [&](const std::string& ds, const std::string& cond, const std::string& llm)
            -> const ColumnAverage* {
            for (const auto& a : averages)
                if (a.dataset == ds && a.verifier == ver && a.condition == cond && a.llm == llm) return &a;
            return nullptr;
        };
        auto avg_row = [&](const std::string& ds, const std::string& label) {
            md << "| " << (ds.empty() ? "All" : ds) << " | " << label << " | ";
            const auto* o = avg_cell(ds, std::string(kConditionOriginal), std::string(kNoLlm));
            md << (o ? fixed3(o->f1) : "-") << " |";
            for (const auto& [cond, llm] : cols) {
                const auto* a = avg_cell(ds, cond, llm);
                md << ' ' << (a ? fixed3(a->f1) : "-") << " | "
                   << (a && a->drop ? fixed3(*a->drop) + (is_ineffective(*a->drop) ? " *" : "") : "-")
                   << " |";
            }
            md << '\n';
        };
        for (const auto& ds : datasets) {
            for (const auto& [uds, user] : users) {
                if (uds != ds) continue;
                md << "| " << ds << " | " << user << " | ";
                const auto o = cell.find({ds, user, std::string(kConditionOriginal), std::string(kNoLlm)});
                md << (o != cell.end() ? fixed3(o->second->metrics.f1) : "-") << " |";
                for (const auto& [cond, llm] : cols) {
                    const auto c = cell.find({ds, user, cond, llm});
                    if (c == cell.end()) {
                        md << " - | - |";
                        continue;
                    }
                    const ResultRow& r = *c->second;
                    md << ' ' << fixed3(r.metrics.f1) << " | "
                       << (r.drop ? fixed3(*r.drop) + (*r.ineffective ? " *" : "") : "-") << " |";
                }
                md << '\n';
            }
            avg_row(ds, "Dataset Avg.");
        }
        avg_row("", "Grand Avg.");
        md << "\n\\* drop < 0.20 (ineffective obfuscation)\n";
    }

    md << "\n## Top features\n\n| Dataset | User | Feature | Mean abs SHAP | Weight | Prompt direction |\n"
          "|---|---|---|---|---|---|\n";
    for (const auto& a : run.attributions) {
        md << "| " << a.dataset_id << " | " << a.author_id << " | " << a.display_name << " | "
           << fixed3(a.mean_abs_shap) << " | " << to_string(a.weight_sign) << " | "
           << to_string(a.prompt_direction) << " |\n";
    }

    md << "\n## Feature change\n\n| Dataset | User | LLM | Feature | Before | After | Delta | Docs moved | "
          "Verdict |\n|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& v : run.verdicts) {
        md << "| " << v.dataset_id << " | " << v.author_id << " | " << v.llm << " | " << v.feature_id << " | "
           << fixed3(v.mean_before) << " | " << fixed3(v.mean_after) << " | " << fixed3(v.delta) << " | "
           << fixed3(v.frac_docs_moved) << " | " << verdict_label(v) << " |\n";
    }

    md << "\n## Dip test\n\n| LLM | Verifier | Condition | n | Dip | p-value | n_boot |\n"
          "|---|---|---|---|---|---|---|\n";
    for (const auto& d : run.dips) {
        md << "| " << d.llm << " | " << d.verifier << " | " << d.condition << " | " << d.n << " | "
           << fixed3(d.dip) << " | " << fixed3(d.p_value) << (d.degenerate ? " (n<4)" : "") << " | "
           << d.n_boot << " |\n";
    }
    return md.str();
}

std::string render_csv(const ObfuscationRun& run) {
    std::string out = "dataset,user,verifier,condition,llm,f1,precision,recall,drop,ineffective\n";
    for (const auto& r : run.rows) {
        const auto& m = r.metrics;
        out += csv_field(m.dataset) + ',' + csv_field(m.user) + ',' + csv_field(m.verifier) + ',' +
               csv_field(m.condition) + ',' + csv_field(m.llm) + ',' + g17(m.f1) + ',' + g17(m.precision) + ',' +
               g17(m.recall) + ',' + (r.drop ? g17(*r.drop) : "") + ',' +
               (r.ineffective ? (*r.ineffective ? "true" : "false") : "") + '\n';
    }
    return out;
}

json run_to_json(const ObfuscationRun& run) {
    json rows = json::array();
    for (const auto& r : run.rows) {
        const auto& m = r.metrics;
        json j = {{"dataset", m.dataset}, {"user", m.user},           {"verifier", m.verifier},
                  {"condition", m.condition}, {"llm", m.llm},          {"f1", m.f1},
                  {"precision", m.precision}, {"recall", m.recall},   {"drop", nullptr},
                  {"ineffective", nullptr}};
        if (r.drop) j["drop"] = *r.drop;
        if (r.ineffective) j["ineffective"] = *r.ineffective;
        rows.push_back(std::move(j));
    }
    return {{"run_id", run.run_id},
            {"config_fingerprint", run.config_fingerprint},
            {"rows", rows},
            {"attributions", json::parse(attributions_to_json(run.attributions))},
            {"verdicts", json::parse(verdicts_to_json(run.verdicts))},
            {"dips", json::parse(dips_to_json(run.dips))}};
}

}  // namespace

std::string render(const ObfuscationRun& run, ReportFormat format) {
    switch (format) {
        case ReportFormat::markdown: return render_markdown(run);
        case ReportFormat::csv: return render_csv(run);
        case ReportFormat::json: return run_to_json(run).dump(2) + "\n";
    }
    return {};
}

ObfuscationRun parse_run_json(std::string_view json_text) {
    ObfuscationRun run;
    try {
        const json j = json::parse(json_text);
        run.run_id = j.at("run_id").get<std::string>();
        run.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        for (const auto& r : j.at("rows")) {
            ResultRow row;
            auto& m = row.metrics;
            m.dataset = r.at("dataset").get<std::string>();
            m.user = r.at("user").get<std::string>();
            m.verifier = r.at("verifier").get<std::string>();
            m.condition = r.at("condition").get<std::string>();
            m.llm = r.at("llm").get<std::string>();
            m.f1 = r.at("f1").get<double>();
            m.precision = r.at("precision").get<double>();
            m.recall = r.at("recall").get<double>();
            if (!r.at("drop").is_null()) row.drop = r.at("drop").get<double>();
            if (!r.at("ineffective").is_null()) row.ineffective = r.at("ineffective").get<bool>();
            run.rows.push_back(std::move(row));
        }
        run.attributions = attributions_from_json(j.at("attributions").dump());
        run.verdicts = verdicts_from_json(j.at("verdicts").dump());
        run.dips = dips_from_json(j.at("dips").dump());
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed run JSON: ") + e.what());
    }
    return run;
}

Metrics metrics_from_predictions(const fs::path& predictions, double threshold) {
    std::ifstream in(predictions);
    if (!in) throw DataError("cannot open " + predictions.string());
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::string line;
    std::set<std::string> ids;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = predictions.string() + ":" + std::to_string(lineno);
        try {
            const json j = json::parse(line);
            const auto id = j.at("id").get<std::string>();
            const int label = j.at("label").get<int>();
            const double p = j.at("probability").get<double>();
            if (label != 0 && label != 1) throw DataError(where + ": label must be 0 or 1");
            if (!(p >= 0.0 && p <= 1.0)) throw DataError(where + ": probability outside [0,1]");
            if (!ids.insert(id).second) throw DataError(where + ": duplicate id '" + id + "'");
            const bool pred = p >= threshold;
            if (pred && label == 1) ++tp;
            else if (pred) ++fp;
            else if (label == 1) ++fn;
            else ++tn;
        } catch (const json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    return metrics_from_counts(tp, fp, fn, tn, threshold);
}

std::vector<MetricRow> read_transformer_results(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("transformer results directory not found: " + dir.string());
    auto sorted_dirs = [](const fs::path& p) {
        std::vector<fs::path> out;
        for (const auto& e : fs::directory_iterator(p))
            if (e.is_directory()) out.push_back(e.path());
        std::sort(out.begin(), out.end());
        return out;
    };
    std::vector<MetricRow> rows;
    for (const auto& ds : sorted_dirs(dir)) {
        for (const auto& user : sorted_dirs(ds)) {
            for (const auto& cond : sorted_dirs(user)) {
                const fs::path metrics_path = cond / "metrics.json";
                std::ifstream in(metrics_path);
                if (!in) throw DataError("missing " + metrics_path.string());
                json mj;
                try {
                    mj = json::parse(in);
                } catch (const json::exception& e) {
                    throw DataError(metrics_path.string() + ": " + e.what());
                }
                const double threshold = mj.value("threshold", 0.5);
                const Metrics m = metrics_from_predictions(cond / "predictions.jsonl", threshold);
                const double reported = mj.value("f1", std::nan(""));
                if (!(std::abs(reported - m.f1) <= 1e-6)) {
                    throw DataError(metrics_path.string() + ": reported f1 " + g17(reported) +
                                    " disagrees with predictions (" + g17(m.f1) + ")");
                }
                MetricRow row;
                row.dataset = ds.filename().string();
                row.user = user.filename().string();
                row.verifier = "transformer";
                const std::string name = cond.filename().string();
                const auto dash = name.find('-');
                row.condition = name.substr(0, dash);
                if (dash != std::string::npos) row.llm = name.substr(dash + 1);
                if (row.condition != kConditionOriginal && row.condition != kConditionZeroShot &&
                    row.condition != kConditionPersonalized) {
                    throw DataError("unknown condition directory " + cond.string());
                }
                row.f1 = m.f1;
                row.precision = m.precision;
                row.recall = m.recall;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

}  // namespace obfusc
