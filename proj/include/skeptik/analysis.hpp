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

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skeptik/extraction.hpp"
#include "skeptik/llm.hpp"
#include "skeptik/taxonomy.hpp"

namespace skeptik {

// Intervention depth: L1 basic clarification, L2 in-depth correction with
// evidence, L3 preemptive context and education.
enum class Level { L1, L2, L3 };
inline constexpr std::array<Level, 3> kLevels = {Level::L1, Level::L2, Level::L3};
std::string_view to_string(Level level);

struct AnnotationLayer {
  Level level = Level::L1;
  std::string explanation;
  std::vector<std::size_t> sentence_span;  // 1-based
  std::optional<std::string> link;

  bool operator==(const AnnotationLayer&) const = default;
};

struct FallacyInstance {
  std::string code;
  std::vector<std::size_t> sentence_indices;  // sorted, unique, 1-based
  // Empty when the model gave no annotation block for this code, otherwise
  // exactly one layer per level in L1, L2, L3 order.
  std::vector<AnnotationLayer> layers;

  const AnnotationLayer* layer(Level level) const;
  bool operator==(const FallacyInstance&) const = default;
};

struct ArticleRef {
  std::string content_hash;
  std::optional<std::string> url;
  std::optional<std::size_t> word_count;
  std::optional<std::size_t> sentence_count;

  bool operator==(const ArticleRef&) const = default;
};

struct AnalysisResult {
  ArticleRef article_ref;
  std::string title;
  std::string source;
  // At most one instance per code, in registry order.
  std::vector<FallacyInstance> detected;
  std::string raw_response;
  std::string created_at;

  const FallacyInstance* find(std::string_view code) const;
  bool operator==(const AnalysisResult&) const = default;
};

enum class ParseMode { Strict, Lenient };
std::string_view to_string(ParseMode mode);
// Accepts "strict" or "lenient"; throws Error(InvalidConfig).
ParseMode parse_mode_from_string(std::string_view text);

struct ParseOutcome {
  AnalysisResult result;
  std::vector<std::string> warnings;
};

// Validates a model response against the detection output schema.
//
// Code fences and surrounding prose are ignored, and common model slips
// (curly quotes, bare integer keys, missing or trailing commas) are repaired
// before giving up with MalformedJson. Strict mode throws SchemaViolation
// with the offending path on the first invalid instance; lenient mode drops
// invalid instances with one warning each and throws EmptyAfterFiltering if
// instances were present but none survived. When the document carries a
// "metadata" object (canonical serialization) its article_ref, created_at
// and raw_response are restored; otherwise raw_response is `raw`.
ParseOutcome parse_llm_response(std::string_view raw,
                                const FallacyRegistry& registry,
                                std::size_t sentence_count, ParseMode mode);

// Canonical serialization: the detection output shape plus a top-level
// "metadata" object. Article sentences are embedded when `article` is given.
nlohmann::ordered_json result_to_json(const AnalysisResult& result,
                                      const Article* article = nullptr);
std::string serialize_result(const AnalysisResult& result,
                             const Article* article = nullptr);

// Keeps a link only if it is an http(s) URL whose host is exactly
// www.google.com or www.bing.com, whose path is /search and whose q
// parameter is non-empty. Kept links are rewritten to https.
std::optional<std::string> sanitize_link(std::string_view url);
AnalysisResult sanitize_links(AnalysisResult result);

// Whitespace-insensitive SHA-256 of the article body.
std::string content_hash(const Article& article);

struct AnalysisInput {
  enum class Kind { Url, Html, Text };
  Kind kind = Kind::Text;
  std::string value;
};

struct AnalyzeOptions {
  ParseMode mode = ParseMode::Lenient;
  // Extra provider round-trips after an unparseable response.
  int parse_retries = 2;
  PromptOptions prompt;
  ExtractionConfig extraction;
  // Required for Kind::Url inputs; returns the page HTML.
  std::function<std::string(const std::string& url)> fetcher;
  // Timestamp source; defaults to now_iso8601().
  std::function<std::string()> clock;
};

struct AnalyzeOutcome {
  Article article;
  AnalysisResult result;
  std::vector<std::string> warnings;
  int attempts = 0;
};

// Turns any input kind into an Article (fetch and/or extract as needed).
Article prepare_article(const AnalysisInput& input, const AnalyzeOptions& options);

// prompt -> complete -> parse -> sanitize, re-asking the provider up to
// parse_retries times on unusable output before throwing AnalysisFailed.
AnalyzeOutcome analyze_article(Article article, const FallacyRegistry& registry,
                               const LlmGateway& gateway,
                               const ProviderConfig& config,
                               const AnalyzeOptions& options = {});

// prepare_article followed by analyze_article.
AnalyzeOutcome analyze(const AnalysisInput& input, const FallacyRegistry& registry,
                       const LlmGateway& gateway, const ProviderConfig& config,
                       const AnalyzeOptions& options = {});

// Re-runs detection for a single code and returns its fresh instance.
// Throws UnknownCode, or AnalysisFailed when no valid instance comes back.
FallacyInstance regenerate_instance(const Article& article,
                                    const FallacyRegistry& registry,
                                    std::string_view code,
                                    const LlmGateway& gateway,
                                    const ProviderConfig& config,
                                    const AnalyzeOptions& options = {});

// Display text for a layer; the pipeline, not the model, frames every
// explanation as a possibility.
std::string hedged_explanation(const FallacyType& fallacy,
                               std::string_view explanation);

struct OverlayTag {
  std::string code;
  std::string name;
  int color_index = 0;
  bool context_needed = false;

  bool operator==(const OverlayTag&) const = default;
};

struct OverlaySentence {
  std::size_t index = 0;
  std::size_t paragraph = 0;
  std::string text;

  bool operator==(const OverlaySentence&) const = default;
};

struct InterventionBundle {
  std::string code;
  std::string name;
  std::string definition;
  std::vector<std::size_t> sentence_indices;
  // Explanations already hedged for display.
  std::vector<AnnotationLayer> layers;
  std::string wikipedia_link;
  std::string search_link;

  bool operator==(const InterventionBundle&) const = default;
};

struct OverlayPayload {
  // Sentence index -> codes flagging it, in registry order.
  std::map<std::size_t, std::vector<std::string>> spans;
  std::vector<OverlayTag> tags;
  std::vector<InterventionBundle> bundles;
  // Text and paragraph ordinal of every annotated sentence, for locating
  // them on the live page.
  std::vector<OverlaySentence> sentences;

  bool operator==(const OverlayPayload&) const = default;
};

// Throws InconsistentInput if the result points past the article's end.
OverlayPayload overlay_payload(const AnalysisResult& result, const Article& article,
                               const FallacyRegistry& registry);

nlohmann::ordered_json payload_to_json(const OverlayPayload& payload);

}  // namespace skeptik
