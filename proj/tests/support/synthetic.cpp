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

#include "synthetic.hpp"

#include <array>
#include <fstream>

#include "obfusc/rng.hpp"

namespace obfusc::testing {

namespace {

constexpr std::array kSubjects = {"the dog",    "my neighbor", "the old man", "a small bird",
                                  "the teacher", "our team",   "the river",   "this city"};
constexpr std::array kVerbs = {"walked to", "looked at", "talked about", "waited near",
                               "cleaned",   "painted",   "visited",      "remembered"};
constexpr std::array kObjects = {"the market", "a quiet park", "the blue house", "the station",
                                 "an old bridge", "the garden", "the library",   "a busy street"};
constexpr std::array kTails = {"yesterday", "slowly", "again", "after lunch", "in the morning", "with care",
                               "for hours", "quietly"};

template <typename A>
std::string pick(Rng& rng, const A& items) {
    return items[rng.below(items.size())];
}

std::string clause(Rng& rng, bool quotes) {
    std::string object = pick(rng, kObjects);
    if (quotes) {
        const auto sp = object.rfind(' ');
        object = object.substr(0, sp + 1) + '"' + object.substr(sp + 1) + '"';
    }
    std::string c = pick(rng, kSubjects) + " " + pick(rng, kVerbs) + " " + object;
    if (rng.uniform() < 0.5) c += " " + pick(rng, kTails);
    return c;
}

std::string sentence(Rng& rng, bool exclaims, const SyntheticSpec& spec) {
    const bool quote = !exclaims && rng.uniform() < spec.quote_rate;
    std::string s = clause(rng, quote);
    if (rng.uniform() < spec.compound_rate) s += (exclaims ? "! and " : " and ") + clause(rng, false);
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s + ".";
}

}  // namespace

std::vector<Document> synthetic_corpus(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    std::vector<Document> docs;
    for (const char* author : {kPlantedAuthor, kOtherAuthor}) {
        const bool exclaims = std::string(author) == kPlantedAuthor;
        for (int i = 0; i < spec.docs_per_author; ++i) {
            Document d;
            d.id = std::string(author) + "-" + std::to_string(i);
            d.author_id = author;
            d.dataset_id = "synthetic";
            const int n = spec.min_sentences +
                          static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_sentences - spec.min_sentences + 1)));
            for (int k = 0; k < n; ++k) d.text += (k ? " " : "") + sentence(rng, exclaims, spec);
            docs.push_back(std::move(d));
        }
    }
    return docs;
}

std::filesystem::path write_synthetic_fixture(const std::filesystem::path& dir, const SyntheticSpec& spec,
                                              int n_boot) {
    std::filesystem::create_directories(dir);
    write_jsonl(dir / "corpus.jsonl", synthetic_corpus(spec));
    const auto cfg = dir / "run.json";
    std::ofstream out(cfg);
    out << R"({
  "datasets": [{"id": "synthetic", "path": "corpus.jsonl", "format": "jsonl"}],
  "split": {"train": 0.6, "val": 0.2, "test": 0.2},
  "neg_ratio": 1.0,
  "schema_version": "wp-1",
  "tagger": "rule",
  "llms": [{"name": "mock", "mock": "follow_prompt:11"}],
  "conditions": ["zeroshot", "personalized"],
  "dip": {"n_boot": )" << n_boot << R"(},
  "output_dir": "out",
  "seed": 2024,
  "concurrency": 2
}
)";
    return cfg;
}

}  // namespace obfusc::testing
