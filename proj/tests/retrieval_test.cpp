//
// Copyright 2026 The qobf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "qobf/retrieval.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qobf/error.hpp"
#include "qobf/preprocess.hpp"
#include "test_support.hpp"

namespace qobf {
namespace {

using Tokens = std::vector<std::string>;

Qrels ParseQrels(const std::string& text) {
  std::istringstream in(text);
  return Qrels::Parse(in);
}

RunList RankedRun(const std::string& qid, const Tokens& docs) {
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    scored.emplace_back(docs[i], 100.0 - static_cast<double>(i));
  }
  return MakeRun(qid, "t", scored, docs.size());
}

TEST(Io, ParsesCorpusQueriesQrels) {
  std::istringstream corpus(
      "{\"doc_id\": \"d1\", \"text\": \"Hello world\"}\n\n{\"doc_id\": \"d2\", \"text\": \"x\"}\n");
  const auto docs = ParseCorpus(corpus);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[1].id, "d2");
  std::istringstream bad("{\"doc\": 1}\n");
  EXPECT_THROW(ParseCorpus(bad), Error);

  std::istringstream queries("q1\tskin cancer\nq2\tloan\n");
  const auto qs = ParseQueries(queries);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].text, "skin cancer");
  std::istringstream dup("q1\ta\nq1\tb\n");
  EXPECT_THROW(ParseQueries(dup), Error);

  const auto qrels = ParseQrels("q1 0 d1 2\nq1 0 d2 0\n");
  EXPECT_EQ(qrels.Relevance("q1", "d1"), 2);
  EXPECT_EQ(qrels.Relevance("q1", "d3"), 0);
  EXPECT_EQ(qrels.Relevant("q1"), (std::set<std::string>{"d1"}));
  EXPECT_FALSE(qrels.HasRelevant("q2"));
  EXPECT_THROW(ParseQrels("q1 0 d1 2\nq1 0 d1 1\n"), Error);
}

TEST(Run, OrderingAndFormat) {
  const auto run = MakeRun("q", "bm25", {{"b", 1.0}, {"a", 1.0}, {"c", 2.0}}, 10);
  EXPECT_EQ(run.DocIds(), (Tokens{"c", "a", "b"}));
  EXPECT_TRUE(run.IsValid());
  EXPECT_EQ(FormatRun(run),
            "q Q0 c 1 2.000000 bm25\nq Q0 a 2 1.000000 bm25\nq Q0 b 3 1.000000 bm25\n");
  EXPECT_EQ(MakeRun("q", "t", {{"b", 1.0}, {"a", 1.0}}, 1).DocIds(), Tokens{"a"});
}

TEST(Index, PostingsAndErrors) {
  const auto index = IndexedCorpus::Build({{"d1", "apple banana"}, {"d2", "cherry date"}});
  EXPECT_EQ(index.postings("apple").size(), 1u);
  EXPECT_EQ(index.postings("cherry").size(), 1u);
  EXPECT_EQ(index.postings("zebra").size(), 0u);
  EXPECT_DOUBLE_EQ(index.average_length(), 2.0);
  EXPECT_THROW(IndexedCorpus::Build({}), Error);
  EXPECT_THROW(IndexedCorpus::Build({{"d1", "a"}, {"d1", "b"}}), Error);
}

TEST(Index, CountsMatchRecount) {
  const auto docs = ReadCorpus(testing::FixtureDir() / "corpus.jsonl");
  const auto index = IndexedCorpus::Build(docs);
  std::map<std::string, std::map<std::size_t, uint32_t>> recount;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : NormalizeAndTokenize(docs[d].text)) ++recount[t][d];
  }
  EXPECT_EQ(index.term_count(), recount.size());
  for (const auto& [term, tf] : recount) {
    const auto postings = index.postings(term);
    ASSERT_EQ(postings.size(), tf.size()) << term;
    for (std::size_t i = 0; i < postings.size(); ++i) {
      if (i > 0) {
        EXPECT_LT(postings[i - 1].doc, postings[i].doc);
      }
      EXPECT_EQ(postings[i].tf, tf.at(postings[i].doc));
    }
  }
}

TEST(Bm25, HandComputed) {
  // N = 2, avgdl = 2.5; "apple" appears once in d1 (length 2), df = 1.
  const auto index = IndexedCorpus::Build({{"d1", "apple pie"}, {"d2", "banana split cake"}});
  const Tokens q{"apple"};
  const auto run = Bm25Search(index, q, {}, 10, "q");
  ASSERT_EQ(run.entries.size(), 1u);
  EXPECT_EQ(run.entries[0].doc_id, "d1");
  const double idf = std::log(1.0 + (2 - 1 + 0.5) / (1 + 0.5));
  const double tf = 1.0 * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 2.0 / 2.5));
  EXPECT_NEAR(run.entries[0].score, idf * tf, 1e-12);
  EXPECT_TRUE(Bm25Search(index, Tokens{"zebra"}, {}, 10).entries.empty());
}

TEST(Tfidf, SelfMatchRanksFirst) {
  const auto docs = ReadCorpus(testing::FixtureDir() / "corpus.jsonl");
  const auto index = IndexedCorpus::Build(docs);
  for (const auto& d : docs) {
    const auto run = TfidfSearch(index, NormalizeAndTokenize(d.text), 100);
    ASSERT_FALSE(run.entries.empty());
    EXPECT_EQ(run.entries[0].doc_id, d.id);
    EXPECT_NEAR(run.entries[0].score, 1.0, 1e-12);
    EXPECT_TRUE(run.IsValid());
  }
  EXPECT_TRUE(TfidfSearch(index, Tokens{"zebra"}, 10).entries.empty());
}

TEST(Embedding, ExactTextRanksFirstAndFullDepth) {
  const auto store = EmbeddingStore::Load(testing::FixtureDir() / "embeddings.txt");
  const auto docs = ReadCorpus(testing::FixtureDir() / "corpus.jsonl");
  const auto index = IndexedCorpus::Build(docs, &store);
  for (const auto& d : docs) {
    const auto run = EmbeddingSearch(index, NormalizeAndTokenize(d.text), store, 1000);
    EXPECT_EQ(run.entries.size(), docs.size());
    EXPECT_EQ(run.entries[0].doc_id, d.id);
  }
  EXPECT_THROW(EmbeddingSearch(index, Tokens{"zebra"}, store, 10), Error);
}

TEST(Embedding, OrthogonalDocuments) {
  const auto store = EmbeddingStore::FromRows({"x", "y", "z"}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const auto index = IndexedCorpus::Build({{"dx", "x"}, {"dy", "y"}, {"dxy", "x y"}}, &store);
  const auto run = EmbeddingSearch(index, Tokens{"x"}, store, 10);
  EXPECT_EQ(run.DocIds(), (Tokens{"dx", "dxy", "dy"}));
  EXPECT_NEAR(run.entries[1].score, std::sqrt(0.5), 1e-12);
}

TEST(Pool, UnionAndErrors) {
  const auto a = RankedRun("q", {"d1", "d2", "d3"});
  const auto b = RankedRun("q", {"d4", "d5", "d6", "d7"});
  EXPECT_EQ(PoolRuns(std::vector<RunList>{a, a}).size(), 3u);
  EXPECT_EQ(PoolRuns(std::vector<RunList>{a, b}).size(), 7u);
  EXPECT_THROW(PoolRuns(std::vector<RunList>{a, RankedRun("other", {"d1"})}), Error);
}

TEST(Rerank, OrdersByOriginalQuery) {
  const auto store = EmbeddingStore::FromRows({"x", "y"}, {{1, 0}, {0, 1}});
  const auto index = IndexedCorpus::Build({{"dx", "x"}, {"dy", "y"}, {"dxy", "x y"}}, &store);
  const Tokens q{"y"};
  EXPECT_EQ(Rerank({"dx", "dy", "dxy"}, q, store, index).DocIds(), (Tokens{"dy", "dxy", "dx"}));
  EXPECT_EQ(Rerank({"dx"}, q, store, index).DocIds(), Tokens{"dx"});
  EXPECT_TRUE(Rerank({}, q, store, index).entries.empty());
}

TEST(Recall, Examples) {
  const auto qrels = ParseQrels("q 0 a 1\nq 0 b 1\nq 0 c 2\nq 0 d 1\nq 0 e 0\n");
  EXPECT_EQ(PooledRecall({"a", "b", "c", "d", "x"}, qrels, "q"), 1.0);
  EXPECT_EQ(PooledRecall({"x", "e"}, qrels, "q"), 0.0);
  EXPECT_EQ(PooledRecall({"a", "c", "x"}, qrels, "q"), 0.5);
  EXPECT_EQ(RunRecall(RankedRun("q", {"a", "x"}), qrels), 0.25);
  EXPECT_THROW(PooledRecall({"a"}, qrels, "none"), Error);
}

TEST(Ndcg, Examples) {
  const auto qrels = ParseQrels("q 0 rel 1\n");
  EXPECT_DOUBLE_EQ(NdcgAt(RankedRun("q", {"rel", "x"}), qrels, 10), 1.0);
  EXPECT_NEAR(NdcgAt(RankedRun("q", {"x", "rel"}), qrels, 10), 1.0 / std::log2(3.0), 1e-12);
  EXPECT_NEAR(NdcgAt(RankedRun("q", {"x", "rel"}), qrels, 10), 0.6309, 1e-4);
  Tokens deep;
  for (int i = 0; i < 10; ++i) deep.push_back("x" + std::to_string(i));
  deep.push_back("rel");
  EXPECT_EQ(NdcgAt(RankedRun("q", deep), qrels, 10), 0.0);
  EXPECT_THROW(NdcgAt(RankedRun("none", {"rel"}), qrels, 10), Error);
}

TEST(Ndcg, GradedAndScaleInvariant) {
  const auto qrels = ParseQrels("q 0 a 2\nq 0 b 1\n");
  // DCG = 1/log2(2) + 3/log2(3); ideal = 3 + 1/log2(3).
  const double expected = (1.0 + 3.0 / std::log2(3.0)) / (3.0 + 1.0 / std::log2(3.0));
  const auto run = MakeRun("q", "t", {{"b", 0.9}, {"a", 0.5}}, 10);
  EXPECT_NEAR(NdcgAt(run, qrels, 10), expected, 1e-12);
  const auto scaled = MakeRun("q", "t", {{"b", 9.0 + 4}, {"a", 5.0 + 4}}, 10);
  EXPECT_EQ(NdcgAt(run, qrels, 10), NdcgAt(scaled, qrels, 10));
}

}  // namespace
}  // namespace qobf
