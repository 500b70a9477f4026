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

#include "obfusc/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/hash.hpp"
#include "obfusc/rng.hpp"

namespace obfusc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
        case Split::unassigned: return "unassigned";
    }
    return "unassigned";
}

Split split_from_string(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "val" || s == "validation") return Split::val;
    if (s == "test") return Split::test;
    if (s.empty() || s == "unassigned") return Split::unassigned;
    throw DataError("unknown split '" + std::string(s) + "'");
}

CorpusFormat corpus_format_from_string(std::string_view s) {
    if (s == "jsonl") return CorpusFormat::jsonl;
    if (s == "csv") return CorpusFormat::csv;
    if (s == "directory" || s == "directory-per-author") return CorpusFormat::directory;
    throw ConfigError("unknown corpus format '" + std::string(s) + "'");
}

void SplitConfig::validate() const {
    if (!(train_frac > 0 && val_frac > 0 && test_frac > 0)) {
        throw ConfigError("split fractions must be positive");
    }
    if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

std::vector<const Document*> BinaryTask::positives_in(Split s) const {
    std::vector<const Document*> out;
    for (const auto& d : positives)
        if (d.split == s) out.push_back(&d);
    return out;
}

std::vector<const Document*> BinaryTask::negatives_in(Split s) const {
    std::vector<const Document*> out;
    for (const auto& d : negatives)
        if (d.split == s) out.push_back(&d);
    return out;
}

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

void check_text(const Document& d, const std::string& where) {
    if (blank(d.text)) throw DataError(where + ": empty \"text\"");
    if (d.id.empty()) throw DataError(where + ": empty \"id\"");
    if (d.author_id.empty()) throw DataError(where + ": empty \"author\"");
}

std::vector<Document> load_jsonl(const fs::path& path, std::string_view default_dataset) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<Document> docs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        json row;
        try {
            row = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(where + ": malformed JSON (" + e.what() + ")");
        }
        if (!row.is_object()) throw DataError(where + ": expected a JSON object");
        Document d;
        try {
            d.id = row.at("id").get<std::string>();
            d.author_id = row.at("author").get<std::string>();
            d.text = row.at("text").get<std::string>();
            d.dataset_id = row.contains("dataset") ? row["dataset"].get<std::string>()
                                                   : std::string(default_dataset);
            if (row.contains("split") && !row["split"].is_null()) {
                d.split = split_from_string(row["split"].get<std::string>());
            }
        } catch (const json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        check_text(d, where);
        docs.push_back(std::move(d));
    }
    return docs;
}

// RFC 4180 record reader. Returns false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& lineno) {
    fields.clear();
    if (in.peek() == std::char_traits<char>::eof()) return false;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    ++lineno;
    for (;;) {
        const int ci = in.get();
        if (ci == std::char_traits<char>::eof()) {
            if (quoted) throw DataError("line " + std::to_string(lineno) + ": unterminated quote");
            fields.push_back(std::move(field));
            return true;
        }
        const char c = static_cast<char>(ci);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++lineno;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\r' && in.peek() == '\n') {
            continue;
        } else if (c == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
}

std::vector<Document> load_csv(const fs::path& path, std::string_view default_dataset) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> fields;
    std::size_t lineno = 0;
    if (!read_csv_record(in, fields, lineno)) throw DataError(path.string() + ": empty file");
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < fields.size(); ++i) col[fields[i]] = i;
    for (const char* required : {"id", "author", "text"}) {
        if (!col.contains(required)) {
            throw DataError(path.string() + ": header lacks column '" + required + "'");
        }
    }
    std::vector<Document> docs;
    while (true) {
        const std::size_t start_line = lineno + 1;
        if (!read_csv_record(in, fields, lineno)) break;
        if (fields.size() == 1 && fields[0].empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(start_line);
        if (fields.size() != col.size()) {
            throw DataError(where + ": expected " + std::to_string(col.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        Document d;
        d.id = fields[col["id"]];
        d.author_id = fields[col["author"]];
        d.text = fields[col["text"]];
        d.dataset_id = col.contains("dataset") ? fields[col["dataset"]] : std::string(default_dataset);
        check_text(d, where);
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<Document> load_directory(const fs::path& root, std::string_view default_dataset) {
    if (!fs::is_directory(root)) throw DataError(root.string() + " is not a directory");
    const std::string dataset =
        default_dataset.empty() ? root.filename().string() : std::string(default_dataset);
    std::vector<fs::path> authors;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) authors.push_back(e.path());
    std::sort(authors.begin(), authors.end());
    std::vector<Document> docs;
    for (const auto& adir : authors) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(adir))
            if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            if (!in) throw DataError("cannot open " + f.string());
            std::ostringstream buf;
            buf << in.rdbuf();
            Document d{f.stem().string(), adir.filename().string(), dataset, buf.str(),
                       Split::unassigned};
            check_text(d, f.string());
            docs.push_back(std::move(d));
        }
    }
    return docs;
}

}  // namespace

std::vector<Document> load_dataset(const fs::path& path, CorpusFormat format,
                                   std::string_view default_dataset) {
    if (!fs::exists(path)) throw DataError(path.string() + " does not exist");
    std::vector<Document> docs;
    switch (format) {
        case CorpusFormat::jsonl: docs = load_jsonl(path, default_dataset); break;
        case CorpusFormat::csv: docs = load_csv(path, default_dataset); break;
        case CorpusFormat::directory: docs = load_directory(path, default_dataset); break;
    }
    if (docs.empty()) throw DataError(path.string() + ": dataset is empty");
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& d : docs) {
        if (!seen.emplace(d.dataset_id, d.id).second) {
            throw DataError(path.string() + ": duplicate document id '" + d.id + "' in dataset '" +
                            d.dataset_id + "'");
        }
    }
    return docs;
}

std::vector<std::string> authors_of(const std::vector<Document>& docs) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& d : docs)
        if (seen.insert(d.author_id).second) out.push_back(d.author_id);
    return out;
}

std::vector<Document> assign_splits(std::vector<Document> docs, const SplitConfig& cfg) {
    cfg.validate();
    // (dataset, author) -> document indices in input order
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].split != Split::unassigned) {
            throw DataError("document '" + docs[i].id + "' already has a split");
        }
        groups[{docs[i].dataset_id, docs[i].author_id}].push_back(i);
    }
    const std::array<double, 3> fracs{cfg.train_frac, cfg.val_frac, cfg.test_frac};
    const std::array<Split, 3> kinds{Split::train, Split::val, Split::test};
    for (auto& [key, idx] : groups) {
        const std::size_t n = idx.size();
        if (n < 10) {
            throw DataError("author '" + key.second + "' in dataset '" + key.first + "' has " +
                            std::to_string(n) + " documents; at least 10 are required");
        }
        Rng rng(derive_seed(cfg.seed, "split", key.first, key.second));

        std::array<std::size_t, 3> counts{};
        std::array<double, 3> rem{};
        std::size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            const double exact = static_cast<double>(n) * fracs[k];
            counts[k] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            rem[k] = exact - static_cast<double>(counts[k]);
            assigned += counts[k];
        }
        std::array<int, 3> order{0, 1, 2};
        rng.shuffle(std::span<int>(order));
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return rem[a] > rem[b] + 1e-12; });
        for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % 3]];

        std::vector<std::size_t> perm = idx;
        rng.shuffle(std::span<std::size_t>(perm));
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k)
            for (std::size_t c = 0; c < counts[k]; ++c) docs[perm[pos++]].split = kinds[k];
    }
    return docs;
}

BinaryTask build_binary_task(std::string_view target, const std::vector<Document>& docs,
                             double neg_ratio, std::uint64_t seed) {
    if (!(neg_ratio >= 0) || !std::isfinite(neg_ratio)) {
        throw ConfigError("neg_ratio must be a non-negative finite number");
    }
    BinaryTask task;
    task.target_author = std::string(target);
    task.neg_ratio = neg_ratio;
    std::set<std::string> datasets;
    for (const auto& d : docs)
        if (d.author_id == target) datasets.insert(d.dataset_id);
    if (datasets.empty()) throw DataError("author '" + std::string(target) + "' has no documents");
    if (datasets.size() > 1) {
        throw DataError("author '" + std::string(target) + "' appears in several datasets");
    }
    task.dataset_id = *datasets.begin();

    for (const auto& d : docs)
        if (d.author_id == target) task.positives.push_back(d);

    for (Split s : {Split::train, Split::val, Split::test}) {
        const auto pos_count = static_cast<std::size_t>(
            std::count_if(task.positives.begin(), task.positives.end(),
                          [s](const Document& d) { return d.split == s; }));
        if (pos_count == 0) {
            throw DataError("author '" + task.target_author + "' has no documents in the " +
                            std::string(to_string(s)) + " split");
        }
        const auto need = static_cast<std::size_t>(std::llround(neg_ratio * static_cast<double>(pos_count)));
        if (need == 0) continue;

        // Candidate pools per other author, in input order.
        std::map<std::string, std::vector<const Document*>> pools;
        for (const auto& d : docs) {
            if (d.dataset_id == task.dataset_id && d.author_id != target && d.split == s) {
                pools[d.author_id].push_back(&d);
            }
        }
        std::size_t available = 0;
        for (const auto& [_, p] : pools) available += p.size();
        if (available < need) {
            throw DataError("split " + std::string(to_string(s)) + " of author '" +
                            task.target_author + "' needs " + std::to_string(need) +
                            " negatives but only " + std::to_string(available) +
                            " are available (short by " + std::to_string(need - available) + ")");
        }

        Rng rng(derive_seed(seed, "negatives", task.dataset_id, task.target_author, to_string(s)));
        std::vector<std::string> others;
        for (const auto& [a, _] : pools) others.push_back(a);
        rng.shuffle(std::span<std::string>(others));

        // Water-filling: equal quotas, capacity-limited authors pass their
        // surplus to the rest; the remainder goes to authors in shuffled order.
        std::map<std::string, std::size_t> quota;
        std::size_t left = need;
        std::vector<std::string> open = others;
        while (left > 0 && !open.empty()) {
            const std::size_t share = left / open.size();
            std::vector<std::string> still_open;
            std::size_t given = 0;
            for (const auto& a : open) {
                const std::size_t cap = pools[a].size() - quota[a];
                const std::size_t take = std::min(share, cap);
                quota[a] += take;
                given += take;
                if (pools[a].size() > quota[a]) still_open.push_back(a);
            }
            left -= given;
            if (share == 0) {
                for (const auto& a : still_open) {
                    if (left == 0) break;
                    ++quota[a];
                    --left;
                }
                break;
            }
            open = std::move(still_open);
        }

        for (const auto& a : others) {
            auto pool = pools[a];
            rng.shuffle(std::span<const Document*>(pool));
            for (std::size_t i = 0; i < quota[a]; ++i) task.negatives.push_back(*pool[i]);
        }
    }
    return task;
}

std::string document_to_jsonl(const Document& doc, std::optional<int> label) {
    json row{{"id", doc.id},
             {"author", doc.author_id},
             {"dataset", doc.dataset_id},
             {"text", doc.text},
             {"split", std::string(to_string(doc.split))}};
    if (label) row["label"] = *label;
    return row.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_jsonl(const fs::path& path, const std::vector<Document>& docs) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& d : docs) out << document_to_jsonl(d) << '\n';
}

void write_task_splits(const fs::path& dir, const BinaryTask& task) {
    fs::create_directories(dir);
    for (Split s : {Split::train, Split::val, Split::test}) {
        std::ofstream out(dir / (std::string(to_string(s)) + ".jsonl"), std::ios::binary);
        if (!out) throw Error("cannot write task split in " + dir.string());
        for (const auto* d : task.positives_in(s)) out << document_to_jsonl(*d, 1) << '\n';
        for (const auto* d : task.negatives_in(s)) out << document_to_jsonl(*d, 0) << '\n';
    }
}

}  // namespace obfusc
