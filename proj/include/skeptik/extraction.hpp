// Copyright 2026 The Skeptik Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace skeptik {

// A news article body, split into paragraphs and 1-based numbered sentences.
// Build through make_article() so that sentences and word_count stay
// consistent with the paragraphs.
struct Article {
  std::optional<std::string> source_url;
  std::optional<std::string> title;
  std::vector<std::string> paragraphs;
  // sentences[i] is sentence number i + 1.
  std::vector<std::string> sentences;
  // Zero-based paragraph ordinal of each sentence.
  std::vector<std::size_t> sentence_paragraph;
  std::size_t word_count = 0;

  std::size_t sentence_count() const noexcept { return sentences.size(); }

  // 1-based lookup; throws std::out_of_range outside 1..sentence_count().
  const std::string& sentence(std::size_t index) const;

  // Paragraphs joined by single spaces.
  std::string body() const;

  bool operator==(const Article&) const = default;
};

struct ExtractionConfig {
  std::size_t min_paragraph_words = 8;
  std::size_t min_cluster_paragraphs = 2;
  // A block whose anchor-text share of tokens exceeds this is boilerplate.
  double link_density_max = 0.33;

  // Throws Error(InvalidConfig) when a threshold is zero or out of range.
  void validate() const;
};

// Builds an Article from already-clean paragraphs. Paragraph whitespace is
// normalized and empty paragraphs are dropped.
Article make_article(std::vector<std::string> paragraphs,
                     std::optional<std::string> source_url = std::nullopt,
                     std::optional<std::string> title = std::nullopt);

// ParEx-style main-content extraction from raw HTML.
//
// Paragraph blocks (<p>) are grouped into runs of consecutive blocks sharing
// a parent element. The run with the largest link-filtered word total wins
// (runs with at least min_cluster_paragraphs blocks are preferred, ties go to
// the earliest run), and within it only blocks meeting min_paragraph_words
// and link_density_max are kept. Run selection does not depend on
// min_paragraph_words, so raising that threshold can only remove paragraphs.
//
// Throws Error(MalformedInput) for binary or tag-free input and
// Error(NoContent) when nothing qualifies.
Article extract_article(std::string_view html,
                        const ExtractionConfig& config = {});

// Plain-text entry path: paragraphs are separated by blank lines.
// Throws Error(NoContent) for whitespace-only input.
Article article_from_text(std::string_view text,
                          std::optional<std::string> source_url = std::nullopt,
                          std::optional<std::string> title = std::nullopt);

// True when `input` looks like an HTML document rather than plain text.
bool looks_like_html(std::string_view input);

// Rule-based sentence splitter. Breaks after . ! or ? (plus any closing
// quotes or brackets) when followed by whitespace and an uppercase letter,
// digit or opening quote/bracket, unless the token is a known abbreviation.
std::vector<std::string> segment_sentences(std::string_view text);

// The abbreviations that never terminate a sentence.
std::span<const std::string_view> sentence_abbreviations();

std::size_t count_words(std::string_view text);
std::size_t word_count(const Article& article);

// Collapses runs of whitespace to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

// Minimal HTML page holding only the article body, one <p> per paragraph.
std::string render_article_html(const Article& article);

}  // namespace skeptik
