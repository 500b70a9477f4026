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

#include "obfusc/tagger.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "obfusc/error.hpp"
#include "obfusc/hash.hpp"
#include "obfusc/rng.hpp"

namespace obfusc {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kPosTagCount> kTagNames{
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X", "SPACE"};

std::size_t index_of(PosTag t) { return static_cast<std::size_t>(t); }

struct LexEntry {
    PosTag tag;
    const char* words;
};

// Closed classes plus a few hundred frequent open-class words.
constexpr LexEntry kLexicon[] = {
    {PosTag::DET,
     "the a an this these those some any no every each all both either neither another such "
     "what which whose much many few several enough"},
    {PosTag::PRON,
     "i me you he him she it we us they them myself yourself himself herself itself ourselves "
     "yourselves themselves mine yours hers ours theirs my your his her its our their who whom "
     "someone something anyone anything everyone everything nobody nothing somebody anybody "
     "everybody none it's i'm i've i'll i'd you're you've you'll you'd he's she's we're we've "
     "we'll they're they've they'll that's there's here's what's who's let's"},
    {PosTag::ADP,
     "of in on at by for with about against between into through during before after above "
     "below from up down over under off out around across along among behind beside besides "
     "beyond near toward towards upon within without via per like despite throughout onto "
     "inside outside underneath past"},
    {PosTag::AUX,
     "be is are was were been being am have has had having do does did will would shall should "
     "can could may might must ought don't doesn't didn't won't wouldn't can't cannot couldn't "
     "shouldn't isn't aren't wasn't weren't haven't hasn't hadn't mustn't mightn't"},
    {PosTag::CCONJ, "and or but nor yet plus"},
    {PosTag::SCONJ,
     "because although though if unless while whereas whether that as until once since than "
     "so-that lest"},
    {PosTag::PART, "not n't"},
    {PosTag::ADV,
     "very really too also just only even still already always never often sometimes usually "
     "then there here now soon again ever quite rather almost perhaps maybe however therefore "
     "thus instead so well when where why how later today tomorrow yesterday back away "
     "anyway somewhat definitely probably actually certainly especially pretty"},
    {PosTag::INTJ,
     "oh wow hey hi hello yes yeah yep nope ok okay please thanks ugh hmm alas ah oops bye "
     "hooray yay"},
    {PosTag::NUM,
     "zero one two three four five six seven eight nine ten eleven twelve thirteen fourteen "
     "fifteen sixteen seventeen eighteen nineteen twenty thirty forty fifty sixty seventy eighty "
     "ninety hundred thousand million billion"},
    {PosTag::VERB,
     "go goes went gone going get gets got gotten getting make makes made making take takes took "
     "taken taking know knows knew known think thinks thought see sees saw seen come comes came "
     "want wants wanted look looks looked use uses used find finds found give gives gave given "
     "tell tells told work works worked call calls called try tries tried ask asks asked need "
     "needs needed feel feels felt become becomes became leave leaves left put puts mean means "
     "meant keep keeps kept let lets begin begins began begun seem seems seemed help helps helped "
     "talk talks talked turn turns turned start starts started show shows showed shown hear hears "
     "heard play plays played run runs ran move moves moved like likes liked live lives lived "
     "believe believes believed hold holds held bring brings brought happen happens happened "
     "write writes wrote written provide provides provided sit sits sat stand stands stood lose "
     "loses lost pay pays paid meet meets met include includes included continue continues "
     "continued set sets learn learns learned change changes changed lead leads led understand "
     "understands understood watch watches watched follow follows followed stop stops stopped "
     "create creates created speak speaks spoke spoken read reads spend spends spent grow grows "
     "grew grown open opens opened walk walks walked win wins won offer offers offered remember "
     "remembers remembered love loves loved consider considers considered appear appears appeared "
     "buy buys bought wait waits waited serve serves served die dies died send sends sent expect "
     "expects expected build builds built stay stays stayed fall falls fell fallen cut cuts reach "
     "reaches reached kill kills killed remain remains remained suggest suggests suggested raise "
     "raises raised pass passes passed sell sells sold require requires required report reports "
     "reported decide decides decided pull pulls pulled eat eats ate eaten drink drinks drank "
     "order orders ordered enjoy enjoys enjoyed recommend recommends recommended say says said "
     "saying taste tastes tasted arrive arrives arrived return returns returned visit visits "
     "visited hate hates hated prefer prefers preferred"},
    {PosTag::ADJ,
     "good bad great new old big small little large long short high low best better worse worst "
     "nice amazing awesome terrible horrible delicious fresh friendly happy sad beautiful easy "
     "hard real sure important different same other own early late young whole free full able "
     "clear poor rich strong true false huge tiny slow fast quick hot cold warm cool dark wrong "
     "right fine cheap expensive clean dirty busy quiet loud funny boring interesting excellent "
     "awful perfect favorite main next last first second third final local special"},
    {PosTag::NOUN,
     "time people way day man woman thing child world life hand part place case week company "
     "system program question work government number night point home water room mother area "
     "money story fact month lot right study book eye job word business issue side kind head "
     "house service friend father power hour game line end member law car city community name "
     "president team minute idea kid body information back parent face others level office door "
     "health person art war history party result change morning reason research girl guy moment "
     "air teacher force education food staff place restaurant movie film review plot actor "
     "actors scene music dinner lunch menu price table order waiter meal"},
};

const std::unordered_map<std::string, PosTag>& lexicon() {
    static const auto* lex = [] {
        auto* m = new std::unordered_map<std::string, PosTag>();
        for (const auto& entry : kLexicon) {
            std::istringstream in(entry.words);
            std::string w;
            while (in >> w) m->emplace(w, entry.tag);  // first class listed wins
        }
        return m;
    }();
    return *lex;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() + 1 && s.substr(s.size() - suffix.size()) == suffix;
}

PosTag suffix_tag(std::string_view w) {
    static constexpr std::string_view kNotAdverbs[] = {"family", "early", "friendly", "likely",
                                                       "lovely", "ugly", "daily", "holy",
                                                       "silly", "reply", "supply", "apply",
                                                       "rely", "italy", "july", "belly", "jelly"};
    if (ends_with(w, "ly")) {
        const bool exception =
            std::find(std::begin(kNotAdverbs), std::end(kNotAdverbs), w) != std::end(kNotAdverbs);
        if (!exception) return PosTag::ADV;
        return w == "reply" || w == "supply" || w == "apply" || w == "rely" ? PosTag::VERB
               : w == "family" || w == "belly" || w == "jelly"                ? PosTag::NOUN
               : w == "italy" || w == "july"                                  ? PosTag::PROPN
                                                                              : PosTag::ADJ;
    }
    for (std::string_view s : {"tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship",
                               "hood", "ism", "ist", "er", "or"}) {
        if (ends_with(w, s)) return PosTag::NOUN;
    }
    for (std::string_view s : {"ous", "ful", "able", "ible", "ive", "ic", "less", "ish", "est",
                               "al"}) {
        if (ends_with(w, s)) return PosTag::ADJ;
    }
    for (std::string_view s : {"ing", "ed", "ize", "ise", "ify"}) {
        if (ends_with(w, s)) return PosTag::VERB;
    }
    return PosTag::X;
}

bool has_alnum(std::string_view w) {
    for (char32_t c : text::decode_utf8(w))
        if (text::is_letter(c) || text::is_digit(c)) return true;
    return false;
}

bool numeric(std::string_view w) {
    bool digit = false;
    for (char c : w) {
        if (c >= '0' && c <= '9') digit = true;
        else if (c != '\'' ) return false;
    }
    return digit;
}

bool is_terminator(const Token& t) {
    return t.kind == TokenKind::punct && (t.surface == "." || t.surface == "!" || t.surface == "?");
}

}  // namespace

std::string_view to_string(PosTag t) { return kTagNames[index_of(t)]; }

PosTag pos_tag_from_string(std::string_view s) {
    for (std::size_t i = 0; i < kPosTagCount; ++i)
        if (kTagNames[i] == s) return kAllPosTags[i];
    throw DataError("unknown POS tag '" + std::string(s) + "'");
}

PosTag RuleTagger::lexical_tag(std::string_view lower_word) {
    if (numeric(lower_word)) return PosTag::NUM;
    const auto& lex = lexicon();
    if (auto it = lex.find(std::string(lower_word)); it != lex.end()) return it->second;
    return suffix_tag(lower_word);
}

std::vector<PosTag> RuleTagger::tag(const TokenStream& stream) const {
    const auto& toks = stream.tokens;
    std::vector<PosTag> tags(toks.size(), PosTag::X);
    const Token* prev = nullptr;  // previous non-space token
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];
        if (t.kind == TokenKind::space) {
            tags[i] = PosTag::SPACE;
            continue;
        }
        if (t.kind == TokenKind::punct) {
            tags[i] = PosTag::PUNCT;
            prev = &t;
            continue;
        }
        const bool sentence_start = prev == nullptr || is_terminator(*prev);
        prev = &t;
        if (!has_alnum(t.surface)) continue;  // X
        const std::string w = text::lower(t.surface);
        PosTag tag = lexical_tag(w);
        const auto cps = text::decode_utf8(t.surface);
        const bool capitalized = !cps.empty() && text::is_upper(cps[0]);
        const bool in_lexicon = lexicon().contains(w) || numeric(w);
        if (capitalized && !sentence_start && !in_lexicon && w != "i") tag = PosTag::PROPN;
        if (tag == PosTag::X) tag = PosTag::NOUN;
        if (w == "to") {
            tag = PosTag::ADP;
            for (std::size_t j = i + 1; j < toks.size(); ++j) {
                if (toks[j].kind == TokenKind::space) continue;
                if (toks[j].kind == TokenKind::word) {
                    const std::string next = text::lower(toks[j].surface);
                    const auto it = lexicon().find(next);
                    if ((it != lexicon().end() &&
                         (it->second == PosTag::VERB || it->second == PosTag::AUX)) ||
                        (it == lexicon().end() && suffix_tag(next) == PosTag::X)) {
                        tag = PosTag::PART;
                    }
                }
                break;
            }
        }
        tags[i] = tag;
    }
    return tags;
}

// ---------------------------------------------------------------------------
// Averaged perceptron

namespace {

std::string normalize_word(std::string_view word) {
    const std::string w = text::lower(word);
    if (w.size() == 4 && std::all_of(w.begin(), w.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return "!YEAR";
    if (!w.empty() && w[0] >= '0' && w[0] <= '9') return "!DIGITS";
    return w;
}

std::string suffix3(const std::string& w) { return w.size() <= 3 ? w : w.substr(w.size() - 3); }

std::vector<std::string> features_at(const std::vector<std::string>& ctx, std::size_t i,
                                     std::string_view prev, std::string_view prev2) {
    // ctx has two start sentinels and two end sentinels around the words.
    const std::size_t k = i + 2;
    const std::string& w = ctx[k];
    std::vector<std::string> f;
    f.reserve(14);
    f.emplace_back("bias");
    f.push_back("i suffix " + suffix3(w));
    f.push_back("i pref1 " + w.substr(0, 1));
    f.push_back("i-1 tag " + std::string(prev));
    f.push_back("i-2 tag " + std::string(prev2));
    f.push_back("i tag+i-2 tag " + std::string(prev) + " " + std::string(prev2));
    f.push_back("i word " + w);
    f.push_back("i-1 tag+i word " + std::string(prev) + " " + w);
    f.push_back("i-1 word " + ctx[k - 1]);
    f.push_back("i-1 suffix " + suffix3(ctx[k - 1]));
    f.push_back("i-2 word " + ctx[k - 2]);
    f.push_back("i+1 word " + ctx[k + 1]);
    f.push_back("i+1 suffix " + suffix3(ctx[k + 1]));
    f.push_back("i+2 word " + ctx[k + 2]);
    return f;
}

std::vector<std::string> context_of(const std::vector<std::string>& words) {
    std::vector<std::string> ctx{"-START-", "-START2-"};
    for (const auto& w : words) ctx.push_back(normalize_word(w));
    ctx.emplace_back("-END-");
    ctx.emplace_back("-END2-");
    return ctx;
}

json weights_payload(const std::unordered_map<std::string, std::array<double, kPosTagCount>>& weights,
                     const std::unordered_map<std::string, PosTag>& tagdict) {
    json w = json::object();
    for (const auto& [feat, row] : weights) w[feat] = row;
    json td = json::object();
    for (const auto& [word, tag] : tagdict) td[word] = std::string(to_string(tag));
    json tags = json::array();
    for (auto name : kTagNames) tags.push_back(std::string(name));
    return json{{"tags", tags}, {"tagdict", td}, {"weights", w}};
}

}  // namespace

PosTag PerceptronTagger::predict(const std::vector<std::string>& features) const {
    std::array<double, kPosTagCount> scores{};
    for (const auto& f : features) {
        const auto it = weights_.find(f);
        if (it == weights_.end()) continue;
        for (std::size_t t = 0; t < kPosTagCount; ++t) scores[t] += it->second[t];
    }
    // Highest score; ties resolved towards the earlier tag for determinism.
    std::size_t best = 0;
    for (std::size_t t = 1; t < kPosTagCount; ++t)
        if (scores[t] > scores[best]) best = t;
    return kAllPosTags[best];
}

std::vector<PosTag> PerceptronTagger::tag_words(const std::vector<std::string>& words) const {
    const auto ctx = context_of(words);
    std::vector<PosTag> out;
    out.reserve(words.size());
    std::string prev = "-START-", prev2 = "-START2-";
    for (std::size_t i = 0; i < words.size(); ++i) {
        PosTag t;
        if (auto it = tagdict_.find(ctx[i + 2]); it != tagdict_.end()) {
            t = it->second;
        } else {
            t = predict(features_at(ctx, i, prev, prev2));
        }
        out.push_back(t);
        prev2 = prev;
        prev = std::string(to_string(t));
    }
    return out;
}

std::vector<PosTag> PerceptronTagger::tag(const TokenStream& stream) const {
    // Punctuation is part of the context the model was trained with; space
    // tokens are not.
    std::vector<std::string> words;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
        if (stream.tokens[i].kind == TokenKind::space) continue;
        words.push_back(stream.tokens[i].surface);
        where.push_back(i);
    }
    const auto tagged = tag_words(words);
    std::vector<PosTag> tags(stream.tokens.size(), PosTag::SPACE);
    for (std::size_t k = 0; k < where.size(); ++k) tags[where[k]] = tagged[k];
    return tags;
}

PerceptronTagger PerceptronTagger::train(const std::vector<Sentence>& sentences, int epochs,
                                         std::uint64_t seed, int tagdict_min_count) {
    PerceptronTagger model;

    // Unambiguous frequent words bypass the model.
    std::unordered_map<std::string, std::array<int, kPosTagCount>> counts;
    for (const auto& s : sentences)
        for (const auto& [w, t] : s) ++counts[normalize_word(w)][index_of(t)];
    for (const auto& [w, c] : counts) {
        int total = 0, best = 0;
        std::size_t arg = 0;
        for (std::size_t t = 0; t < kPosTagCount; ++t) {
            total += c[t];
            if (c[t] > best) {
                best = c[t];
                arg = t;
            }
        }
        if (total >= tagdict_min_count && static_cast<double>(best) / total >= 0.97) {
            model.tagdict_[w] = kAllPosTags[arg];
        }
    }

    using Row = std::array<double, kPosTagCount>;
    std::unordered_map<std::string, Row> totals, stamps;
    long long instance = 0;
    auto update = [&](const std::vector<std::string>& feats, std::size_t truth, std::size_t guess) {
        ++instance;
        if (truth == guess) return;
        for (const auto& f : feats) {
            auto& w = model.weights_[f];
            auto& tot = totals[f];
            auto& ts = stamps[f];
            for (std::size_t t : {truth, guess}) {
                tot[t] += (static_cast<double>(instance) - ts[t]) * w[t];
                ts[t] = static_cast<double>(instance);
                w[t] += t == truth ? 1.0 : -1.0;
            }
        }
    };

    std::vector<std::size_t> order(sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t si : order) {
            const auto& s = sentences[si];
            std::vector<std::string> words;
            for (const auto& [w, _] : s) words.push_back(w);
            const auto ctx = context_of(words);
            std::string prev = "-START-", prev2 = "-START2-";
            for (std::size_t i = 0; i < s.size(); ++i) {
                PosTag guess;
                if (auto it = model.tagdict_.find(ctx[i + 2]); it != model.tagdict_.end()) {
                    guess = it->second;
                } else {
                    const auto feats = features_at(ctx, i, prev, prev2);
                    guess = model.predict(feats);
                    update(feats, index_of(s[i].second), index_of(guess));
                }
                prev2 = prev;
                prev = std::string(to_string(guess));
            }
        }
        rng.shuffle(std::span<std::size_t>(order));
    }

    // Average.
    for (auto& [f, w] : model.weights_) {
        auto& tot = totals[f];
        auto& ts = stamps[f];
        for (std::size_t t = 0; t < kPosTagCount; ++t) {
            const double total = tot[t] + (static_cast<double>(instance) - ts[t]) * w[t];
            w[t] = instance > 0 ? total / static_cast<double>(instance) : 0.0;
        }
    }
    std::erase_if(model.weights_, [](const auto& kv) {
        return std::all_of(kv.second.begin(), kv.second.end(), [](double v) { return v == 0.0; });
    });
    return model;
}

void PerceptronTagger::save(const std::filesystem::path& path) const {
    json payload = weights_payload(weights_, tagdict_);
    const std::string checksum = sha256_hex(payload.dump());
    json doc{{"format", "obfusc-perceptron-tagger"},
             {"version", 1},
             {"checksum", checksum},
             {"model", std::move(payload)}};
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump() << '\n';
}

PerceptronTagger PerceptronTagger::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("tagger weights not found: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("tagger weights " + path.string() + " are corrupt: " + e.what());
    }
    try {
        if (doc.at("format") != "obfusc-perceptron-tagger" || doc.at("version") != 1) {
            throw DataError("tagger weights " + path.string() + " have an unsupported format");
        }
        const json& payload = doc.at("model");
        if (sha256_hex(payload.dump()) != doc.at("checksum").get<std::string>()) {
            throw DataError("tagger weights " + path.string() + " fail checksum verification");
        }
        PerceptronTagger model;
        for (const auto& [feat, row] : payload.at("weights").items())
            model.weights_[feat] = row.get<std::array<double, kPosTagCount>>();
        for (const auto& [word, tag] : payload.at("tagdict").items())
            model.tagdict_[word] = pos_tag_from_string(tag.get<std::string>());
        return model;
    } catch (const json::exception& e) {
        throw DataError("tagger weights " + path.string() + " are corrupt: " + e.what());
    }
}

std::vector<PosTag> pos_tag(const TokenStream& stream, const Tagger& tagger) {
    std::vector<PosTag> tags = tagger.tag(stream);
    if (tags.size() != stream.tokens.size()) {
        throw Error("tagger '" + tagger.name() + "' returned the wrong number of tags");
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
        switch (stream.tokens[i].kind) {
            case TokenKind::punct: tags[i] = PosTag::PUNCT; break;
            case TokenKind::space: tags[i] = PosTag::SPACE; break;
            case TokenKind::word:
                if (tags[i] == PosTag::PUNCT || tags[i] == PosTag::SPACE) tags[i] = PosTag::X;
                break;
        }
    }
    return tags;
}

std::shared_ptr<const Tagger> make_tagger(std::string_view spec) {
    if (spec.empty() || spec == "rule") return std::make_shared<const RuleTagger>();
    constexpr std::string_view prefix = "perceptron:";
    if (spec.starts_with(prefix)) {
        return std::make_shared<const PerceptronTagger>(
            PerceptronTagger::load(std::string(spec.substr(prefix.size()))));
    }
    throw ConfigError("unknown tagger '" + std::string(spec) + "'");
}

}  // namespace obfusc
