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

#include "qobf/preprocess.hpp"

#include <cctype>
#include <fstream>

#include "qobf/error.hpp"
#include "strings.hpp"

namespace qobf {
namespace {

bool IsTokenByte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

}  // namespace

std::vector<std::string> NormalizeAndTokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (IsTokenByte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string CanonicalTag(std::string_view tag) {
  std::string lower = internal::ToLower(internal::Trim(tag));
  if (lower == "adjective") return std::string(TagLexicon::kAdjective);
  if (lower == "propn") return std::string(TagLexicon::kNoun);
  return lower;
}

TagLexicon::TagLexicon()
    : target_tags_{std::string(kNoun), std::string(kAdjective)} {}

TagLexicon TagLexicon::Load(const std::filesystem::path& lexicon,
                            const std::optional<std::filesystem::path>& stopwords) {
  std::ifstream lex(lexicon);
  if (!lex) Fail(ErrorCode::kIo, "cannot open tag lexicon '" + lexicon.string() + "'");
  if (!stopwords) return Parse(lex, nullptr);
  std::ifstream stop(*stopwords);
  if (!stop) {
    Fail(ErrorCode::kIo, "cannot open stop-word list '" + stopwords->string() + "'");
  }
  return Parse(lex, &stop);
}

TagLexicon TagLexicon::Parse(std::istream& lexicon, std::istream* stopwords) {
  TagLexicon out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(lexicon, line)) {
    ++line_number;
    const auto trimmed = internal::Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto fields = internal::SplitWhitespace(trimmed);
    if (fields.size() != 2) {
      Fail(ErrorCode::kParse, "tag lexicon line " + std::to_string(line_number) +
                                  ": expected '<word> <tag>'");
    }
    out.AddTag(fields[0], fields[1]);
  }
  if (stopwords != nullptr) {
    while (std::getline(*stopwords, line)) {
      const auto trimmed = internal::Trim(line);
      if (trimmed.empty() || trimmed.front() == '#') continue;
      out.AddStopWord(trimmed);
    }
  }
  return out;
}

void TagLexicon::AddTag(std::string_view word, std::string_view tag) {
  std::string key = internal::ToLower(word);
  std::string canonical = CanonicalTag(tag);
  const auto [it, inserted] = tags_.emplace(key, canonical);
  if (!inserted && it->second != canonical) {
    Fail(ErrorCode::kDuplicate, "conflicting tags for '" + key + "': " +
                                    it->second + " and " + canonical);
  }
}

void TagLexicon::AddStopWord(std::string_view word) {
  stop_words_.insert(internal::ToLower(word));
}

void TagLexicon::SetTargetTags(std::set<std::string> tags) {
  std::set<std::string> canonical;
  for (const auto& tag : tags) canonical.insert(CanonicalTag(tag));
  target_tags_ = std::move(canonical);
}

std::string TagLexicon::TagOf(std::string_view word) const {
  const std::string key(word);
  if (stop_words_.contains(key)) return std::string(kStopWord);
  const auto it = tags_.find(key);
  if (it == tags_.end()) return std::string(kNoun);
  return it->second;
}

bool TagLexicon::IsTargetTag(std::string_view tag) const {
  if (tag == kStopWord) return false;
  return target_tags_.contains(std::string(tag));
}

std::vector<std::string> TaggedQuery::Surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) out.push_back(token.surface);
  return out;
}

std::string TaggedQuery::Normalized() const {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token.surface;
  }
  return out;
}

std::size_t TaggedQuery::TargetCount() const {
  std::size_t count = 0;
  for (const auto& token : tokens) count += token.target ? 1 : 0;
  return count;
}

TaggedQuery TagTargets(const std::vector<std::string>& tokens,
                       const EmbeddingStore& store, const TagLexicon& lexicon) {
  TaggedQuery query;
  query.tokens.reserve(tokens.size());
  for (const auto& surface : tokens) {
    TaggedToken token;
    token.surface = surface;
    token.tag = lexicon.TagOf(surface);
    token.in_vocab = store.Contains(surface);
    token.target = token.in_vocab && lexicon.IsTargetTag(token.tag);
    query.tokens.push_back(std::move(token));
  }
  return query;
}

TaggedQuery PrepareQuery(std::string_view text, const EmbeddingStore& store,
                         const TagLexicon& lexicon) {
  TaggedQuery query = TagTargets(NormalizeAndTokenize(text), store, lexicon);
  query.original_text = std::string(text);
  return query;
}

}  // namespace qobf
