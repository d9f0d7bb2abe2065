#!/usr/bin/env python3
# Copyright 2026 The qobf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the desk fixture in tests/fixtures.

Words are grouped by topic; each vector is the topic centroid plus noise so
nearest neighbours stay mostly inside a topic. Output is deterministic.
"""

import json
import pathlib
import sys

import numpy as np

DIM = 16
SEED = 20260101

TOPICS = {
    "medicine": ("treatment therapy cancer tumor skin disease patient doctor "
                 "hospital clinic vaccine virus infection symptom diagnosis "
                 "surgery nurse medicine drug dose chronic acute clinical medical"),
    "finance": ("bank loan mortgage interest rate credit debt savings account "
                "stock bond market investor fund dividend tax budget income "
                "inflation price payment cheap expensive financial"),
    "sport": ("football soccer tennis match team player coach goal league "
              "season stadium score tournament championship referee training "
              "athlete race medal olympic fast strong athletic sporty"),
    "cooking": ("recipe pasta sauce tomato garlic onion oven bread flour sugar "
                "butter cheese soup salad chicken kitchen chef dinner spicy "
                "sweet fresh baked tasty delicious"),
    "travel": ("flight airport hotel beach island passport luggage ticket "
               "tourist museum city map train journey cruise resort visa "
               "holiday exotic scenic cheapest remote tropical coastal"),
    "computing": ("computer software laptop keyboard program code compiler "
                  "server network database memory processor linux python "
                  "algorithm bug kernel cloud digital fast virtual portable open"),
    "garden": ("garden flower rose tree seed soil plant lawn weed compost "
               "fertilizer shovel greenhouse tulip orchard fruit vegetable "
               "harvest green organic wild leafy seasonal"),
    "music": ("guitar piano violin song album concert band singer melody "
              "rhythm drum jazz orchestra lyric chord studio record "
              "loud acoustic classical live vocal musical"),
}
ADJECTIVES = set(
    "chronic acute clinical medical cheap expensive financial fast strong athletic "
    "sporty spicy sweet fresh baked tasty delicious exotic scenic cheapest remote "
    "tropical coastal digital virtual portable open green organic wild leafy "
    "seasonal loud acoustic classical live vocal musical".split())
STOPWORDS = "the a an of for and or in on to with best how what is are my".split()

QUERIES = [
    ("q1", "treatment for skin cancer"),
    ("q2", "cheap mortgage interest rate"),
    ("q3", "best football coach for my team"),
    ("q4", "spicy tomato pasta recipe"),
    ("q5", "Cheapest flight to a tropical island!"),
]


def main(out: pathlib.Path) -> None:
    rng = np.random.default_rng(SEED)
    out.mkdir(parents=True, exist_ok=True)
    vocab = {}
    for topic, words in TOPICS.items():
        centroid = rng.normal(size=DIM)
        centroid /= np.linalg.norm(centroid)
        for w in words.split():
            if w in vocab:
                continue
            vocab[w] = (topic, 2.0 * centroid + 0.9 * rng.normal(size=DIM))
    for w in STOPWORDS:
        vocab[w] = ("stop", 0.3 * rng.normal(size=DIM))

    with open(out / "embeddings.txt", "w") as f:
        for w, (_, v) in vocab.items():
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")
    with open(out / "lexicon.txt", "w") as f:
        for w, (topic, _) in vocab.items():
            if topic != "stop":
                f.write(f"{w} {'adj' if w in ADJECTIVES else 'noun'}\n")
    with open(out / "stopwords.txt", "w") as f:
        f.write("\n".join(STOPWORDS) + "\n")

    # 20 documents, 2-3 per topic, mixing topic words with stop words.
    docs = []
    topics = list(TOPICS)
    for i in range(20):
        topic = topics[i % len(topics)]
        words = TOPICS[topic].split()
        picked = list(rng.choice(words, size=int(rng.integers(6, 12)), replace=True))
        picked += list(rng.choice(STOPWORDS, size=3))
        if i % 5 == 0:
            picked += list(rng.choice(TOPICS[topics[(i + 3) % len(topics)]].split(), size=2))
        rng.shuffle(picked)
        docs.append((f"d{i:02d}", topic, " ".join(picked).capitalize() + "."))
    with open(out / "corpus.jsonl", "w") as f:
        for doc_id, _, text in docs:
            f.write(json.dumps({"doc_id": doc_id, "text": text}) + "\n")

    with open(out / "queries.tsv", "w") as f:
        for qid, text in QUERIES:
            f.write(f"{qid}\t{text}\n")

    # Graded qrels: 2 if the doc shares a content word with the query and is on
    # topic, 1 if only on topic. q5 gets no judgments except one off-topic 0.
    query_topics = {"q1": "medicine", "q2": "finance", "q3": "sport", "q4": "cooking",
                    "q5": "travel"}
    with open(out / "qrels.txt", "w") as f:
        for qid, text in QUERIES:
            qwords = set(text.lower().replace("!", "").split()) - set(STOPWORDS)
            for doc_id, topic, body in docs:
                if topic != query_topics[qid]:
                    continue
                dwords = set(body.lower().rstrip(".").split())
                f.write(f"{qid} 0 {doc_id} {2 if qwords & dwords else 1}\n")

    (out / "config.ini").write_text(
        "[inputs]\n"
        "embeddings = embeddings.txt\n"
        "lexicon = lexicon.txt\n"
        "stopwords = stopwords.txt\n"
        "corpus = corpus.jsonl\n"
        "queries = queries.tsv\n"
        "qrels = qrels.txt\n"
        "\n[mechanism]\n"
        "name = wbb\n"
        "epsilon = 1,5,10,50\n"
        "k = 4\n"
        "n = 20\n"
        "measure = angle\n"
        "\n[retrieval]\n"
        "scorers = bm25,tfidf,embedding\n"
        "depth = 100\n"
        "cutoff = 10\n"
        "\n[run]\n"
        "batch = 20\n"
        "seed = 42\n"
        "out = out\n")


if __name__ == "__main__":
    main(pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures"))
