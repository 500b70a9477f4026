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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "obfusc/corpus.hpp"
#include "obfusc/error.hpp"

namespace fs = std::filesystem;

namespace obfusc {
namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("obfusc-corpus-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
                                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
}

std::vector<Document> make_docs(const std::string& author, int n, const std::string& dataset = "ds") {
    std::vector<Document> docs;
    for (int i = 0; i < n; ++i) docs.push_back({author + "-" + std::to_string(i), author, dataset, "text " + std::to_string(i), Split::unassigned});
    return docs;
}

std::map<Split, int> split_counts(const std::vector<Document>& docs, const std::string& author) {
    std::map<Split, int> c;
    for (const auto& d : docs)
        if (d.author_id == author) ++c[d.split];
    return c;
}

TEST(LoadDataset, JsonlKeepsFileOrder) {
    TempDir t;
    write_file(t.path() / "d.jsonl",
               "{\"id\":\"b\",\"author\":\"u1\",\"dataset\":\"yelp\",\"text\":\"Second?\"}\n"
               "{\"id\":\"a\",\"author\":\"u2\",\"dataset\":\"yelp\",\"text\":\"First  text\"}\n");
    const auto docs = load_dataset(t.path() / "d.jsonl", CorpusFormat::jsonl);
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].id, "b");
    EXPECT_EQ(docs[1].text, "First  text");  // verbatim
    EXPECT_EQ(docs[1].author_id, "u2");
    EXPECT_EQ(docs[0].split, Split::unassigned);
}

TEST(LoadDataset, DirectoryPerAuthor) {
    TempDir t;
    for (int i = 0; i < 3; ++i) write_file(t.path() / "A" / ("a" + std::to_string(i) + ".txt"), "alpha");
    for (int i = 0; i < 2; ++i) write_file(t.path() / "B" / ("b" + std::to_string(i) + ".txt"), "beta");
    const auto docs = load_dataset(t.path(), CorpusFormat::directory, "blog");
    ASSERT_EQ(docs.size(), 5u);
    std::map<std::string, int> per_author;
    for (const auto& d : docs) {
        ++per_author[d.author_id];
        EXPECT_EQ(d.dataset_id, "blog");
    }
    EXPECT_EQ(per_author["A"], 3);
    EXPECT_EQ(per_author["B"], 2);
}

TEST(LoadDataset, CsvWithQuotedFields) {
    TempDir t;
    write_file(t.path() / "d.csv",
               "id,author,dataset,text\n"
               "1,u1,imdb,\"He said \"\"hi\"\", then left\"\n"
               "2,u2,imdb,\"line one\nline two\"\n");
    const auto docs = load_dataset(t.path() / "d.csv", CorpusFormat::csv);
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].text, "He said \"hi\", then left");
    EXPECT_EQ(docs[1].text, "line one\nline two");
}

TEST(LoadDataset, EmptyTextNamesTheRow) {
    TempDir t;
    write_file(t.path() / "d.jsonl",
               "{\"id\":\"a\",\"author\":\"u\",\"dataset\":\"x\",\"text\":\"ok\"}\n"
               "{\"id\":\"b\",\"author\":\"u\",\"dataset\":\"x\",\"text\":\"   \"}\n");
    try {
        load_dataset(t.path() / "d.jsonl", CorpusFormat::jsonl);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("d.jsonl:2"), std::string::npos) << e.what();
    }
}

TEST(LoadDataset, MalformedAndEmptyInputsFail) {
    TempDir t;
    write_file(t.path() / "bad.jsonl", "{\"id\":\"a\",\"author\":\"u\"\n");
    EXPECT_THROW(load_dataset(t.path() / "bad.jsonl", CorpusFormat::jsonl), DataError);
    write_file(t.path() / "empty.jsonl", "");
    EXPECT_THROW(load_dataset(t.path() / "empty.jsonl", CorpusFormat::jsonl), DataError);
    write_file(t.path() / "dup.jsonl",
               "{\"id\":\"a\",\"author\":\"u\",\"dataset\":\"x\",\"text\":\"1\"}\n"
               "{\"id\":\"a\",\"author\":\"v\",\"dataset\":\"x\",\"text\":\"2\"}\n");
    EXPECT_THROW(load_dataset(t.path() / "dup.jsonl", CorpusFormat::jsonl), DataError);
    EXPECT_THROW(load_dataset(t.path() / "missing.jsonl", CorpusFormat::jsonl), DataError);
}

TEST(AssignSplits, ExactFractions) {
    SplitConfig cfg{0.8, 0.1, 0.1, 7};
    const auto docs = assign_splits(make_docs("a", 100), cfg);
    const auto c = split_counts(docs, "a");
    EXPECT_EQ(c.at(Split::train), 80);
    EXPECT_EQ(c.at(Split::val), 10);
    EXPECT_EQ(c.at(Split::test), 10);
}

TEST(AssignSplits, LargestRemainderOn95Docs) {
    // 76 / 9.5 / 9.5: the spare document goes to val or test.
    std::set<std::pair<int, int>> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto c = split_counts(assign_splits(make_docs("a", 95), {0.8, 0.1, 0.1, seed}), "a");
        EXPECT_EQ(c.at(Split::train), 76);
        seen.insert({c.at(Split::val), c.at(Split::test)});
    }
    for (const auto& p : seen) EXPECT_TRUE(p == std::make_pair(9, 10) || p == std::make_pair(10, 9));
    EXPECT_EQ(seen.size(), 2u) << "tie should be broken both ways across seeds";
}

TEST(AssignSplits, DeterministicPartitionWithinOneDocument) {
    auto docs = make_docs("a", 37);
    auto more = make_docs("b", 23);
    docs.insert(docs.end(), more.begin(), more.end());
    const SplitConfig cfg{0.7, 0.2, 0.1, 99};
    const auto x = assign_splits(docs, cfg);
    EXPECT_EQ(x, assign_splits(docs, cfg));
    for (const auto& [author, n] : {std::pair{"a", 37}, {"b", 23}}) {
        const auto c = split_counts(x, author);
        EXPECT_EQ(c.at(Split::train) + c.at(Split::val) + c.at(Split::test), n);
        EXPECT_LE(std::abs(c.at(Split::train) - 0.7 * n), 1.0);
        EXPECT_LE(std::abs(c.at(Split::val) - 0.2 * n), 1.0);
        EXPECT_LE(std::abs(c.at(Split::test) - 0.1 * n), 1.0);
    }
    EXPECT_NE(x, assign_splits(docs, {0.7, 0.2, 0.1, 100}));
}

TEST(AssignSplits, RejectsSmallAuthorsAndBadFractions) {
    EXPECT_THROW(assign_splits(make_docs("a", 9), {0.8, 0.1, 0.1, 1}), DataError);
    EXPECT_THROW(assign_splits(make_docs("a", 20), {0.8, 0.1, 0.2, 1}), ConfigError);
    EXPECT_THROW(assign_splits(make_docs("a", 20), {1.0, 0.0, 0.0, 1}), ConfigError);
}

std::vector<Document> three_authors() {
    std::vector<Document> docs;
    for (const char* a : {"t", "u", "v"}) {
        auto d = make_docs(a, 100);
        docs.insert(docs.end(), d.begin(), d.end());
    }
    return assign_splits(docs, {0.8, 0.1, 0.1, 5});
}

TEST(BuildBinaryTask, BalancedNegativesStratifiedAcrossAuthors) {
    const auto docs = three_authors();
    const auto task = build_binary_task("t", docs, 1.0, 11);
    EXPECT_EQ(task.positives.size(), 100u);
    EXPECT_EQ(task.negatives.size(), 100u);
    for (Split s : {Split::train, Split::val, Split::test}) {
        std::map<std::string, int> per;
        for (const auto* d : task.negatives_in(s)) {
            EXPECT_EQ(d->split, s);
            ++per[d->author_id];
        }
        const int expect = s == Split::train ? 40 : 5;
        EXPECT_EQ(per["u"], expect);
        EXPECT_EQ(per["v"], expect);
    }
    std::set<std::string> pos;
    for (const auto& d : task.positives) pos.insert(d.id);
    for (const auto& d : task.negatives) {
        EXPECT_NE(d.author_id, "t");
        EXPECT_EQ(pos.count(d.id), 0u);
    }
}

TEST(BuildBinaryTask, DeterministicAndSeedSensitive) {
    const auto docs = three_authors();
    const auto a = build_binary_task("t", docs, 0.5, 3);
    const auto b = build_binary_task("t", docs, 0.5, 3);
    const auto c = build_binary_task("t", docs, 0.5, 4);
    EXPECT_EQ(a.negatives, b.negatives);
    EXPECT_NE(a.negatives, c.negatives);
    EXPECT_EQ(a.negatives.size(), 50u);
}

TEST(BuildBinaryTask, ZeroRatioAndErrors) {
    const auto docs = three_authors();
    EXPECT_TRUE(build_binary_task("t", docs, 0.0, 1).negatives.empty());
    try {
        build_binary_task("t", docs, 3.0, 1);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("short"), std::string::npos) << e.what();
    }
    auto no_test = docs;
    for (auto& d : no_test)
        if (d.author_id == "t" && d.split == Split::test) d.split = Split::train;
    EXPECT_THROW(build_binary_task("t", no_test, 1.0, 1), DataError);
    EXPECT_THROW(build_binary_task("nobody", docs, 1.0, 1), DataError);
}

TEST(WriteTaskSplits, LabelledJsonlPerSplit) {
    TempDir t;
    const auto task = build_binary_task("t", three_authors(), 1.0, 2);
    write_task_splits(t.path(), task);
    for (const char* name : {"train", "val", "test"}) {
        std::ifstream in(t.path() / (std::string(name) + ".jsonl"));
        std::string line;
        int pos = 0, neg = 0;
        while (std::getline(in, line)) {
            const auto j = nlohmann::json::parse(line);
            EXPECT_EQ(j.at("split"), name);
            (j.at("label") == 1 ? pos : neg)++;
        }
        EXPECT_EQ(pos, neg) << name;
        EXPECT_GT(pos, 0) << name;
    }
}

}  // namespace
}  // namespace obfusc
