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

#ifndef QOBF_PREPROCESS_HPP_
#define QOBF_PREPROCESS_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qobf/embeddings.hpp"

namespace qobf {

// Lowercases and splits on whitespace and ASCII punctuation. Bytes >= 0x80
// are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> NormalizeAndTokenize(std::string_view text);

// Word -> coarse tag table plus a stop-word list. Stop words are never
// targets; words missing from the table are tagged as nouns.
class TagLexicon {
 public:
  static constexpr std::string_view kNoun = "noun";
  static constexpr std::string_view kAdjective = "adj";
  static constexpr std::string_view kStopWord = "stop";

  TagLexicon();

  // `<word> <tag>` per line; blank lines and lines starting with '#' skipped.
  static TagLexicon Load(const std::filesystem::path& lexicon,
                         const std::optional<std::filesystem::path>& stopwords = {});
  static TagLexicon Parse(std::istream& lexicon, std::istream* stopwords);

  void AddTag(std::string_view word, std::string_view tag);
  void AddStopWord(std::string_view word);
  void SetTargetTags(std::set<std::string> tags);

  std::string TagOf(std::string_view word) const;
  bool IsTargetTag(std::string_view tag) const;
  const std::set<std::string>& target_tags() const { return target_tags_; }

 private:
  std::unordered_map<std::string, std::string> tags_;
  std::unordered_set<std::string> stop_words_;
  std::set<std::string> target_tags_;
};

// Canonical spelling of a tag: lowercase, "adjective" -> "adj",
// "propn" -> "noun".
std::string CanonicalTag(std::string_view tag);

struct TaggedToken {
  std::string surface;
  std::string tag;
  bool target = false;
  bool in_vocab = false;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct TaggedQuery {
  std::string original_text;
  std::vector<TaggedToken> tokens;

  std::vector<std::string> Surfaces() const;
  // Surfaces joined by single spaces.
  std::string Normalized() const;
  std::size_t TargetCount() const;
};

TaggedQuery TagTargets(const std::vector<std::string>& tokens,
                       const EmbeddingStore& store, const TagLexicon& lexicon);

// NormalizeAndTokenize followed by TagTargets.
TaggedQuery PrepareQuery(std::string_view text, const EmbeddingStore& store,
                         const TagLexicon& lexicon);

}  // namespace qobf

#endif  // QOBF_PREPROCESS_HPP_
