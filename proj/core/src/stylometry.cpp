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

#include "obfusc/stylometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <variant>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/hash.hpp"

namespace obfusc {

namespace detail {
extern const char kFunctionWordsFile[];
}

using nlohmann::json;

namespace {

struct PunctDef {
    const char* id;
    const char* display;
};

// Order matters: it is the feature order of wp-1.
constexpr PunctDef kPunct[] = {
    {"punct_comma", "commas"},
    {"punct_period", "periods"},
    {"punct_exclam", "exclamation marks"},
    {"punct_question", "question marks"},
    {"punct_semicolon", "semicolons"},
    {"punct_colon", "colons"},
    {"punct_dash", "dashes"},
    {"punct_squote", "single quotation marks"},
    {"punct_dquote", "double quotation marks"},
    {"punct_lparen", "left parentheses"},
    {"punct_rparen", "right parentheses"},
};
constexpr std::size_t kPunctCount = std::size(kPunct);

constexpr std::array<const char*, kPosTagCount> kPosDisplay{
    "adjectives",
    "adpositions (prepositions)",
    "adverbs",
    "auxiliary verbs",
    "coordinating conjunctions",
    "determiners",
    "interjections",
    "nouns",
    "numerals",
    "particles",
    "pronouns",
    "proper nouns",
    "punctuation tokens",
    "subordinating conjunctions",
    "symbols",
    "verbs",
    "other (X part-of-speech) tokens",
    "whitespace (SPACE part-of-speech) tokens",
};

constexpr std::size_t kWordLengthBins = 15;

// Index into kPunct for a punct token surface, or -1.
int punct_slot(std::string_view surface) {
    const auto cps = text::decode_utf8(surface);
    if (cps.size() != 1) return -1;
    const char32_t c = text::fold_quote(cps[0]);
    if (text::is_dash(c)) return 6;
    switch (c) {
        case U',': return 0;
        case U'.': return 1;
        case U'!': return 2;
        case U'?': return 3;
        case U';': return 4;
        case U':': return 5;
        case U'\'': return 7;
        case U'"': return 8;
        case U'(': return 9;
        case U')': return 10;
        default: return -1;
    }
}

std::vector<std::string> parse_word_list(std::string_view content) {
    std::vector<std::string> out;
    std::istringstream in{std::string(content)};
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(text::lower(line.substr(first)));
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(FeatureUnit u) {
    switch (u) {
        case FeatureUnit::percent: return "percent";
        case FeatureUnit::per_100_tokens: return "per_100_tokens";
        case FeatureUnit::count: return "count";
        case FeatureUnit::ratio: return "ratio";
        case FeatureUnit::scalar: return "scalar";
    }
    return "scalar";
}

FeatureUnit feature_unit_from_string(std::string_view s) {
    for (auto u : {FeatureUnit::percent, FeatureUnit::per_100_tokens, FeatureUnit::count,
                   FeatureUnit::ratio, FeatureUnit::scalar})
        if (to_string(u) == s) return u;
    throw DataError("unknown feature unit '" + std::string(s) + "'");
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view feature_id) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].feature_id == feature_id) return i;
    return std::nullopt;
}

const FeatureEntry& FeatureSchema::at(std::string_view feature_id) const {
    const auto i = index_of(feature_id);
    if (!i) throw DataError("feature '" + std::string(feature_id) + "' is not in schema " + version);
    return entries[*i];
}

FeatureSchema FeatureSchema::subset(std::span<const std::string> ids) const {
    FeatureSchema out;
    std::string key;
    for (const auto& e : entries) {
        if (std::find(ids.begin(), ids.end(), e.feature_id) != ids.end()) {
            out.entries.push_back(e);
            key += e.feature_id + ",";
        }
    }
    for (const auto& id : ids) (void)at(id);
    out.version = version + "/subset-" + sha256_hex(key).substr(0, 8);
    return out;
}

const std::vector<std::string>& default_function_words() {
    static const std::vector<std::string> words = parse_word_list(detail::kFunctionWordsFile);
    return words;
}

std::string default_function_words_sha256() { return sha256_hex(detail::kFunctionWordsFile); }

std::vector<std::string> load_function_words(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read function-word list " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto words = parse_word_list(buf.str());
    if (words.empty()) throw DataError("function-word list " + path.string() + " is empty");
    return words;
}

FeatureSchema make_schema(const std::vector<std::string>& function_words) {
    FeatureSchema s;
    auto add = [&](std::string id, std::string display, FeatureUnit unit) {
        s.entries.push_back({std::move(id), std::move(display), unit});
    };
    add("char_count", "characters", FeatureUnit::count);
    add("uppercase_pct", "uppercase characters", FeatureUnit::percent);
    add("digit_pct", "digits", FeatureUnit::percent);
    add("whitespace_pct", "whitespace characters", FeatureUnit::percent);
    add("word_count", "words", FeatureUnit::count);
    add("avg_word_length", "letters per word", FeatureUnit::scalar);
    for (std::size_t k = 1; k < kWordLengthBins; ++k) {
        add("wl_" + std::to_string(k),
            k == 1 ? std::string("one-letter words") : "words of " + std::to_string(k) + " letters",
            FeatureUnit::percent);
    }
    add("wl_15plus", "words of 15 or more letters", FeatureUnit::percent);
    add("type_token_ratio", "distinct words", FeatureUnit::ratio);
    add("hapax_ratio", "words used only once", FeatureUnit::ratio);
    add("yule_k", "repeated vocabulary", FeatureUnit::scalar);
    for (const auto& p : kPunct) add(p.id, p.display, FeatureUnit::per_100_tokens);
    for (std::size_t t = 0; t < kPosTagCount; ++t) {
        add("pos_" + std::string(to_string(kAllPosTags[t])), kPosDisplay[t],
            FeatureUnit::per_100_tokens);
    }
    std::vector<std::string> seen;
    for (const auto& w : function_words) {
        const std::string lw = text::lower(w);
        if (std::find(seen.begin(), seen.end(), lw) != seen.end()) {
            throw ConfigError("duplicate function word '" + lw + "'");
        }
        seen.push_back(lw);
        add("fw_" + lw, "occurrences of the word \"" + lw + "\"", FeatureUnit::per_100_tokens);
    }
    add("sentence_count", "sentences", FeatureUnit::count);
    add("avg_sentence_len_words", "words per sentence", FeatureUnit::scalar);
    add("sentence_len_std", "variation in sentence length", FeatureUnit::scalar);

    if (function_words == default_function_words()) {
        s.version = std::string(kDefaultSchemaVersion);
    } else {
        std::string joined;
        for (const auto& w : seen) joined += w + "\n";
        s.version = std::string(kDefaultSchemaVersion) + "+fw-" + sha256_hex(joined).substr(0, 8);
    }
    return s;
}

FeatureSchema default_schema() {
    static const FeatureSchema schema = make_schema(default_function_words());
    return schema;
}

// ---------------------------------------------------------------------------

namespace {

enum class Kind {
    char_count, uppercase_pct, digit_pct, whitespace_pct, word_count, avg_word_length, word_len_bin,
    ttr, hapax, yule_k, punct, pos, function_word, sentence_count, avg_sentence_len, sentence_len_std
};

struct Step {
    Kind kind;
    std::size_t slot = 0;
};

struct Profile {
    std::size_t chars = 0, letters = 0, upper = 0, digits = 0, spaces = 0;
    std::size_t tokens = 0, words = 0, word_chars = 0;
    std::array<std::size_t, kWordLengthBins> word_len{};
    std::unordered_map<std::string, std::size_t> types;
    std::array<std::size_t, kPunctCount> punct{};
    std::array<std::size_t, kPosTagCount> pos{};
    std::vector<std::size_t> function_words;
    std::vector<std::size_t> sentence_words;
};

double per100(std::size_t count, std::size_t total) {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

struct FeatureExtractor::Plan {
    std::vector<Step> steps;
    std::unordered_map<std::string, std::size_t> function_word_slot;
    bool needs_pos = false;
};

FeatureExtractor::FeatureExtractor(FeatureSchema schema, std::shared_ptr<const Tagger> tagger)
    : schema_(std::move(schema)), tagger_(std::move(tagger)), plan_(std::make_unique<Plan>()) {
    if (!tagger_) throw ConfigError("feature extraction needs a tagger");
    static const std::map<std::string, Kind, std::less<>> fixed{
        {"char_count", Kind::char_count},
        {"uppercase_pct", Kind::uppercase_pct},
        {"digit_pct", Kind::digit_pct},
        {"whitespace_pct", Kind::whitespace_pct},
        {"word_count", Kind::word_count},
        {"avg_word_length", Kind::avg_word_length},
        {"type_token_ratio", Kind::ttr},
        {"hapax_ratio", Kind::hapax},
        {"yule_k", Kind::yule_k},
        {"sentence_count", Kind::sentence_count},
        {"avg_sentence_len_words", Kind::avg_sentence_len},
        {"sentence_len_std", Kind::sentence_len_std},
    };
    for (const auto& e : schema_.entries) {
        const std::string& id = e.feature_id;
        if (auto it = fixed.find(id); it != fixed.end()) {
            plan_->steps.push_back({it->second});
            continue;
        }
        if (id == "wl_15plus") {
            plan_->steps.push_back({Kind::word_len_bin, kWordLengthBins - 1});
            continue;
        }
        if (id.starts_with("wl_")) {
            std::size_t k = 0;
            const auto* b = id.data() + 3;
            const auto res = std::from_chars(b, id.data() + id.size(), k);
            if (res.ec == std::errc() && res.ptr == id.data() + id.size() && k >= 1 &&
                k < kWordLengthBins) {
                plan_->steps.push_back({Kind::word_len_bin, k - 1});
                continue;
            }
        }
        if (id.starts_with("punct_")) {
            const auto* p = std::find_if(std::begin(kPunct), std::end(kPunct),
                                         [&](const PunctDef& d) { return id == d.id; });
            if (p != std::end(kPunct)) {
                plan_->steps.push_back({Kind::punct, static_cast<std::size_t>(p - std::begin(kPunct))});
                continue;
            }
        }
        if (id.starts_with("pos_")) {
            const PosTag t = pos_tag_from_string(std::string_view(id).substr(4));
            plan_->steps.push_back({Kind::pos, static_cast<std::size_t>(t)});
            plan_->needs_pos = true;
            continue;
        }
        if (id.starts_with("fw_") && id.size() > 3) {
            const std::string word = id.substr(3);
            const auto slot = plan_->function_word_slot.size();
            plan_->function_word_slot.emplace(word, slot);
            plan_->steps.push_back({Kind::function_word, plan_->function_word_slot.at(word)});
            continue;
        }
        throw DataError("schema " + schema_.version + " has unknown feature id '" + id + "'");
    }
}

FeatureExtractor::~FeatureExtractor() = default;
FeatureExtractor::FeatureExtractor(FeatureExtractor&&) noexcept = default;
FeatureExtractor& FeatureExtractor::operator=(FeatureExtractor&&) noexcept = default;

FeatureVector FeatureExtractor::extract(std::string_view input) const {
    FeatureVector out;
    out.schema_version = schema_.version;
    out.values.assign(schema_.size(), 0.0);
    if (input.empty()) return out;

    Profile p;
    p.function_words.assign(plan_->function_word_slot.size(), 0);
    for (char32_t c : text::decode_utf8(input)) {
        ++p.chars;
        if (text::is_letter(c)) {
            ++p.letters;
            if (text::is_upper(c)) ++p.upper;
        }
        if (text::is_digit(c)) ++p.digits;
        if (text::is_space(c)) ++p.spaces;
    }

    const TokenStream stream = tokenize(input);
    p.tokens = stream.tokens.size();
    std::vector<PosTag> tags;
    if (plan_->needs_pos) tags = pos_tag(stream, *tagger_);

    std::size_t boundary = 0;
    std::size_t words_in_sentence = 0;
    for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
        while (boundary < stream.sentence_boundaries.size() &&
               stream.sentence_boundaries[boundary] == i) {
            if (words_in_sentence > 0) p.sentence_words.push_back(words_in_sentence);
            words_in_sentence = 0;
            ++boundary;
        }
        const Token& t = stream.tokens[i];
        if (plan_->needs_pos) ++p.pos[static_cast<std::size_t>(tags[i])];
        if (t.kind == TokenKind::word) {
            ++p.words;
            ++words_in_sentence;
            const std::size_t len = text::length(t.surface);
            p.word_chars += len;
            ++p.word_len[std::min(len, kWordLengthBins) - 1];
            std::string lw = text::lower(t.surface);
            if (auto it = plan_->function_word_slot.find(lw); it != plan_->function_word_slot.end()) {
                ++p.function_words[it->second];
            }
            ++p.types[std::move(lw)];
        } else if (t.kind == TokenKind::punct) {
            if (const int slot = punct_slot(t.surface); slot >= 0) ++p.punct[slot];
        }
    }
    if (words_in_sentence > 0) p.sentence_words.push_back(words_in_sentence);

    const double n_words = static_cast<double>(p.words);
    double yule = 0.0, hapax = 0.0;
    if (p.words > 0) {
        std::map<std::size_t, std::size_t> freq_of_freq;
        for (const auto& [_, f] : p.types) ++freq_of_freq[f];
        double s2 = 0.0;
        for (const auto& [m, vm] : freq_of_freq) s2 += static_cast<double>(m * m * vm);
        yule = 1e4 * (s2 - n_words) / (n_words * n_words);
        hapax = freq_of_freq.contains(1)
                    ? static_cast<double>(freq_of_freq[1]) / static_cast<double>(p.types.size())
                    : 0.0;
    }
    double mean_sentence = 0.0, std_sentence = 0.0;
    if (!p.sentence_words.empty()) {
        const double ns = static_cast<double>(p.sentence_words.size());
        double sum = 0.0;
        for (auto w : p.sentence_words) sum += static_cast<double>(w);
        mean_sentence = sum / ns;
        double ss = 0.0;
        for (auto w : p.sentence_words) ss += (static_cast<double>(w) - mean_sentence) * (static_cast<double>(w) - mean_sentence);
        std_sentence = std::sqrt(ss / ns);
    }

    for (std::size_t k = 0; k < plan_->steps.size(); ++k) {
        const Step& s = plan_->steps[k];
        double v = 0.0;
        switch (s.kind) {
            case Kind::char_count: v = static_cast<double>(p.chars); break;
            case Kind::uppercase_pct: v = per100(p.upper, p.letters); break;
            case Kind::digit_pct: v = per100(p.digits, p.chars); break;
            case Kind::whitespace_pct: v = per100(p.spaces, p.chars); break;
            case Kind::word_count: v = n_words; break;
            case Kind::avg_word_length:
                v = p.words == 0 ? 0.0 : static_cast<double>(p.word_chars) / n_words;
                break;
            case Kind::word_len_bin: v = per100(p.word_len[s.slot], p.words); break;
            case Kind::ttr:
                v = p.words == 0 ? 0.0 : static_cast<double>(p.types.size()) / n_words;
                break;
            case Kind::hapax: v = hapax; break;
            case Kind::yule_k: v = yule; break;
            case Kind::punct: v = per100(p.punct[s.slot], p.tokens); break;
            case Kind::pos: v = per100(p.pos[s.slot], p.tokens); break;
            case Kind::function_word: v = per100(p.function_words[s.slot], p.tokens); break;
            case Kind::sentence_count: v = static_cast<double>(p.sentence_words.size()); break;
            case Kind::avg_sentence_len: v = mean_sentence; break;
            case Kind::sentence_len_std: v = std_sentence; break;
        }
        out.values[k] = v;
    }
    return out;
}

double FeatureExtractor::value(std::string_view text, std::string_view feature_id) const {
    const auto idx = schema_.index_of(feature_id);
    if (!idx) throw DataError("feature '" + std::string(feature_id) + "' is not in schema " + schema_.version);
    return extract(text).values[*idx];
}

FeatureVector extract(std::string_view text, const FeatureSchema& schema,
                      std::shared_ptr<const Tagger> tagger) {
    return FeatureExtractor(schema, std::move(tagger)).extract(text);
}

std::string schema_to_json(const FeatureSchema& schema) {
    json entries = json::array();
    for (const auto& e : schema.entries) {
        entries.push_back({{"feature_id", e.feature_id},
                           {"display_name", e.display_name},
                           {"unit", std::string(to_string(e.unit))}});
    }
    return json{{"version", schema.version}, {"entries", entries}}.dump(2);
}

FeatureSchema schema_from_json(std::string_view json_text) {
    try {
        const json doc = json::parse(json_text);
        FeatureSchema s;
        s.version = doc.at("version").get<std::string>();
        for (const auto& e : doc.at("entries")) {
            s.entries.push_back({e.at("feature_id").get<std::string>(),
                                 e.at("display_name").get<std::string>(),
                                 feature_unit_from_string(e.at("unit").get<std::string>())});
        }
        return s;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed schema JSON: ") + e.what());
    }
}

void write_feature_matrix(const std::filesystem::path& csv_path, const FeatureSchema& schema,
                          const std::vector<std::string>& doc_ids,
                          const std::vector<FeatureVector>& rows) {
    if (doc_ids.size() != rows.size()) throw Error("feature matrix: ids and rows differ in length");
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write " + csv_path.string());
    out << "doc_id";
    for (const auto& e : schema.entries) out << ',' << e.feature_id;
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].schema_version != schema.version || rows[r].values.size() != schema.size()) {
            throw SchemaMismatch("feature row for '" + doc_ids[r] + "' does not match schema " +
                                 schema.version);
        }
        if (doc_ids[r].find_first_of(",\"\n\r") != std::string::npos) {
            out << '"';
            for (char c : doc_ids[r]) {
                if (c == '"') out << '"';
                out << c;
            }
            out << '"';
        } else {
            out << doc_ids[r];
        }
        for (double v : rows[r].values) out << ',' << fmt_double(v);
        out << '\n';
    }
    std::ofstream side(csv_path.string() + ".schema.json", std::ios::binary);
    side << schema_to_json(schema) << '\n';
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& csv_path) {
    FeatureMatrix m;
    {
        std::ifstream side(csv_path.string() + ".schema.json", std::ios::binary);
        if (!side) throw DependencyError("missing schema sidecar for " + csv_path.string());
        std::ostringstream buf;
        buf << side.rdbuf();
        m.schema = schema_from_json(buf.str());
    }
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw DependencyError("missing feature matrix " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(csv_path.string() + ": empty feature matrix");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string id;
        std::size_t pos = 0;
        if (line[0] == '"') {
            pos = 1;
            while (pos < line.size()) {
                if (line[pos] == '"') {
                    if (pos + 1 < line.size() && line[pos + 1] == '"') {
                        id.push_back('"');
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                id.push_back(line[pos++]);
            }
        } else {
            pos = line.find(',');
            id = line.substr(0, pos);
        }
        FeatureVector v;
        v.schema_version = m.schema.version;
        while (pos != std::string::npos && pos < line.size()) {
            const std::size_t start = pos + 1;
            const std::size_t end = line.find(',', start);
            const std::string_view cell =
                std::string_view(line).substr(start, end == std::string::npos ? std::string::npos : end - start);
            double value = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                throw DataError(csv_path.string() + ":" + std::to_string(lineno) + ": bad number '" +
                                std::string(cell) + "'");
            }
            v.values.push_back(value);
            pos = end;
        }
        if (v.values.size() != m.schema.size()) {
            throw DataError(csv_path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(m.schema.size()) + " values");
        }
        m.doc_ids.push_back(std::move(id));
        m.rows.push_back(std::move(v));
    }
    return m;
}

}  // namespace obfusc
