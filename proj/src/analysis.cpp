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

#include "skeptik/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <variant>

#include "skeptik/error.hpp"
#include "skeptik/util.hpp"

namespace skeptik {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Level level) {
  switch (level) {
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
  }
  return "L1";
}

std::string_view to_string(ParseMode mode) {
  return mode == ParseMode::Strict ? "strict" : "lenient";
}

ParseMode parse_mode_from_string(std::string_view text) {
  if (text == "strict") return ParseMode::Strict;
  if (text == "lenient") return ParseMode::Lenient;
  throw Error(ErrorCode::InvalidConfig,
              "parse mode must be 'strict' or 'lenient', got '" + std::string(text) + "'");
}

const AnnotationLayer* FallacyInstance::layer(Level level) const {
  for (const auto& l : layers) {
    if (l.level == level) return &l;
  }
  return nullptr;
}

const FallacyInstance* AnalysisResult::find(std::string_view code) const {
  for (const auto& d : detected) {
    if (d.code == code) return &d;
  }
  return nullptr;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Pulls the JSON document out of a model reply: the first fenced block if
// there is one, else the outermost braces.
std::string_view locate_json(std::string_view raw) {
  auto fence = raw.find("```");
  if (fence != std::string_view::npos) {
    auto body = raw.find('\n', fence);
    if (body != std::string_view::npos) {
      auto close = raw.find("```", body);
      std::string_view inner = raw.substr(
          body + 1, close == std::string_view::npos ? std::string_view::npos : close - body - 1);
      if (inner.find('{') != std::string_view::npos) raw = inner;
    }
  }
  auto first = raw.find('{');
  auto last = raw.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
    return {};
  }
  return raw.substr(first, last - first + 1);
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos;
       pos += to.size()) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

// Repairs the slips seen in real replies (and in the reference template):
// curly double quotes, bare integer keys, missing and trailing commas.
std::string repair_json(std::string_view text) {
  std::string s = replace_all(std::string(text), "\xE2\x80\x9C", "\"");
  s = replace_all(std::move(s), "\xE2\x80\x9D", "\"");

  std::string out;
  out.reserve(s.size() + 16);
  bool in_string = false;
  // Last significant character emitted outside strings, or '"' after a
  // closing quote.
  char last = 0;
  auto last_significant = [&]() -> char {
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (!is_space(*it)) return *it;
    }
    return 0;
  };
  auto ends_value = [](char c) {
    return c == '}' || c == ']' || c == '"' || std::isalnum(static_cast<unsigned char>(c));
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < s.size()) {
        out += s[++i];
      } else if (c == '"') {
        in_string = false;
        last = '"';
      }
      continue;
    }
    if (is_space(c)) {
      out += c;
      continue;
    }
    if ((c == '"' || c == '{' || c == '[') && ends_value(last) && last_significant() != ':' &&
        last_significant() != ',' && last_significant() != '[' && last_significant() != '{') {
      out += ',';
    }
    if (std::isdigit(static_cast<unsigned char>(c)) && (last == '{' || last == ',')) {
      // Possible bare integer key: digits followed by ':'.
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      std::size_t k = j;
      while (k < s.size() && is_space(s[k])) ++k;
      if (k < s.size() && s[k] == ':') {
        out += '"';
        out.append(s, i, j - i);
        out += '"';
        last = '"';
        i = j - 1;
        continue;
      }
    }
    if (c == '}' || c == ']') {
      // Drop a trailing comma.
      auto pos = out.find_last_not_of(" \t\r\n");
      if (pos != std::string::npos && out[pos] == ',') out.erase(pos, 1);
    }
    if (c == '"') in_string = true;
    out += c;
    last = c;
  }
  return out;
}

json parse_json_document(std::string_view raw) {
  std::string_view text = locate_json(raw);
  if (text.empty()) {
    throw Error(ErrorCode::MalformedJson, "no JSON object in response");
  }
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) doc = json::parse(repair_json(text), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::MalformedJson, "response is not a JSON object");
  }
  return doc;
}

struct Violation {
  std::string path;
  std::string message;
};

std::string quote_key(std::string_view key) { return "[\"" + std::string(key) + "\"]"; }

// Reads a sentence list: an array of integers (a single integer is also
// accepted) within 1..count.
std::variant<std::vector<std::size_t>, Violation> read_indices(const json& node,
                                                                const std::string& path,
                                                                std::size_t count) {
  std::vector<std::size_t> out;
  auto take = [&](const json& v, const std::string& where) -> std::optional<Violation> {
    if (!v.is_number_integer()) return Violation{where, "sentence index is not an integer"};
    auto value = v.get<long long>();
    if (value < 1 || static_cast<std::size_t>(value) > count) {
      return Violation{where, "sentence " + std::to_string(value) + " outside 1.." +
                                  std::to_string(count)};
    }
    out.push_back(static_cast<std::size_t>(value));
    return std::nullopt;
  };
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      if (auto v = take(node[i], path + "[" + std::to_string(i) + "]")) return *v;
    }
  } else if (auto v = take(node, path)) {
    return *v;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::variant<AnnotationLayer, Violation> read_layer(const json& block, Level level,
                                                    const std::string& path,
                                                    const std::vector<std::size_t>& fallback,
                                                    std::size_t count) {
  std::string level_path = path + "." + std::string(to_string(level));
  auto it = block.find(std::string(to_string(level)));
  if (it == block.end()) return Violation{level_path, "missing annotation level"};
  const json* entry = &*it;
  if (entry->is_array()) {
    if (entry->empty()) return Violation{level_path, "annotation level is empty"};
    entry = &(*entry)[0];
    level_path += "[0]";
  }
  if (!entry->is_object()) return Violation{level_path, "annotation is not an object"};

  AnnotationLayer layer;
  layer.level = level;
  auto expl = entry->find("explanation");
  if (expl == entry->end() || !expl->is_string()) {
    return Violation{level_path + ".explanation", "explanation missing or not a string"};
  }
  layer.explanation = expl->get<std::string>();
  if (auto span = entry->find("sentence"); span != entry->end()) {
    auto read = read_indices(*span, level_path + ".sentence", count);
    if (auto* v = std::get_if<Violation>(&read)) return *v;
    layer.sentence_span = std::get<std::vector<std::size_t>>(std::move(read));
  } else {
    layer.sentence_span = fallback;
  }
  if (auto link = entry->find("link"); link != entry->end() && !link->is_null()) {
    if (!link->is_string()) return Violation{level_path + ".link", "link is not a string"};
    layer.link = link->get<std::string>();
  }
  return layer;
}

std::variant<FallacyInstance, Violation> read_instance(const std::string& code,
                                                       const std::string& code_path,
                                                       const json& fallacies,
                                                       const std::string& base,
                                                       const FallacyRegistry& registry,
                                                       std::size_t count) {
  if (!registry.contains(code)) return Violation{code_path, "unknown fallacy code " + code};
  FallacyInstance instance;
  instance.code = code;

  std::string spans_path = base + ".sentences" + quote_key(code);
  const json* spans = nullptr;
  if (auto s = fallacies.find("sentences"); s != fallacies.end() && s->is_object()) {
    if (auto e = s->find(code); e != s->end()) spans = &*e;
  }
  if (spans == nullptr) return Violation{spans_path, "no sentences for " + code};
  auto read = read_indices(*spans, spans_path, count);
  if (auto* v = std::get_if<Violation>(&read)) return *v;
  instance.sentence_indices = std::get<std::vector<std::size_t>>(std::move(read));
  if (instance.sentence_indices.empty()) {
    return Violation{spans_path, "empty sentence list for " + code};
  }

  if (auto a = fallacies.find("annotations"); a != fallacies.end() && a->is_object()) {
    if (auto block = a->find(code); block != a->end()) {
      std::string block_path = base + ".annotations" + quote_key(code);
      if (!block->is_object()) return Violation{block_path, "annotation block is not an object"};
      for (Level level : kLevels) {
        auto layer = read_layer(*block, level, block_path, instance.sentence_indices, count);
        if (auto* v = std::get_if<Violation>(&layer)) return *v;
        instance.layers.push_back(std::get<AnnotationLayer>(std::move(layer)));
      }
    }
  }
  return instance;
}

void merge_into(FallacyInstance& target, const FallacyInstance& extra) {
  std::vector<std::size_t> merged;
  std::set_union(target.sentence_indices.begin(), target.sentence_indices.end(),
                 extra.sentence_indices.begin(), extra.sentence_indices.end(),
                 std::back_inserter(merged));
  target.sentence_indices = std::move(merged);
  if (target.layers.empty()) target.layers = extra.layers;
}

std::optional<std::size_t> optional_size(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_number_unsigned()) return std::nullopt;
  return it->get<std::size_t>();
}

}  // namespace

ParseOutcome parse_llm_response(std::string_view raw, const FallacyRegistry& registry,
                                std::size_t sentence_count, ParseMode mode) {
  if (sentence_count == 0) {
    throw Error(ErrorCode::PreconditionViolation, "sentence_count must be >= 1");
  }
  const bool strict = mode == ParseMode::Strict;
  json doc = parse_json_document(raw);

  ParseOutcome outcome;
  AnalysisResult& result = outcome.result;
  result.raw_response = std::string(raw);

  auto cases = doc.find("cases");
  if (cases == doc.end() || !cases->is_array()) {
    throw Error(ErrorCode::SchemaViolation, "missing \"cases\" array", "$.cases");
  }

  auto reject = [&](const Violation& v) {
    if (strict) throw Error(ErrorCode::SchemaViolation, v.message, v.path);
    outcome.warnings.push_back("dropped at " + v.path + ": " + v.message);
  };

  std::size_t candidates = 0;
  std::vector<FallacyInstance> kept;
  for (std::size_t ci = 0; ci < cases->size(); ++ci) {
    const json& item = (*cases)[ci];
    std::string base = "$.cases[" + std::to_string(ci) + "]";
    if (!item.is_object()) {
      reject({base, "case is not an object"});
      continue;
    }
    if (ci == 0 || result.title.empty()) {
      if (auto n = item.find("name"); n != item.end() && n->is_string()) {
        result.title = n->get<std::string>();
      }
    }
    if (ci == 0 || result.source.empty()) {
      if (auto s = item.find("source"); s != item.end() && s->is_string()) {
        result.source = s->get<std::string>();
      }
    }
    auto fallacies_it = item.find("fallacies");
    if (fallacies_it == item.end() || !fallacies_it->is_object()) {
      reject({base + ".fallacies", "missing \"fallacies\" object"});
      continue;
    }
    const json& fallacies = *fallacies_it;
    base += ".fallacies";

    // Codes: the declared list first, then any keyed only under sentences.
    std::vector<std::pair<std::string, std::string>> codes;  // code, path
    std::set<std::string> seen;
    auto listed = fallacies.find("logical_fallacies");
    if (listed != fallacies.end()) {
      if (!listed->is_array()) {
        reject({base + ".logical_fallacies", "not an array"});
        continue;
      }
      for (std::size_t i = 0; i < listed->size(); ++i) {
        std::string path = base + ".logical_fallacies[" + std::to_string(i) + "]";
        const json& code = (*listed)[i];
        if (!code.is_string()) {
          ++candidates;
          reject({path, "fallacy code is not a string"});
          continue;
        }
        if (seen.insert(code.get<std::string>()).second) {
          codes.emplace_back(code.get<std::string>(), path);
        } else if (!strict) {
          outcome.warnings.push_back("duplicate code " + code.get<std::string>() + " merged");
        }
      }
    } else if (strict) {
      reject({base + ".logical_fallacies", "missing fallacy list"});
    }
    if (auto s = fallacies.find("sentences"); s != fallacies.end() && s->is_object()) {
      for (const auto& [key, _] : s->items()) {
        if (seen.insert(key).second) {
          codes.emplace_back(key, base + ".sentences" + quote_key(key));
        }
      }
    }
    if (auto a = fallacies.find("annotations"); a != fallacies.end() && a->is_object()) {
      for (const auto& [key, _] : a->items()) {
        if (!seen.count(key)) {
          std::string path = base + ".annotations" + quote_key(key);
          if (strict) throw Error(ErrorCode::SchemaViolation, "annotation for unlisted code " + key, path);
          outcome.warnings.push_back("ignored annotation for unlisted code " + key);
        }
      }
    }

    for (const auto& [code, path] : codes) {
      ++candidates;
      auto read = read_instance(code, path, fallacies, base, registry, sentence_count);
      if (auto* v = std::get_if<Violation>(&read)) {
        reject(*v);
        continue;
      }
      auto instance = std::get<FallacyInstance>(std::move(read));
      auto existing = std::find_if(kept.begin(), kept.end(),
                                   [&](const FallacyInstance& f) { return f.code == code; });
      if (existing != kept.end()) {
        merge_into(*existing, instance);
        if (!strict) outcome.warnings.push_back("duplicate code " + code + " merged");
      } else {
        kept.push_back(std::move(instance));
      }
    }
  }

  if (!strict && candidates > 0 && kept.empty()) {
    throw Error(ErrorCode::EmptyAfterFiltering, "no valid fallacy instance survived");
  }
  std::sort(kept.begin(), kept.end(), [&](const FallacyInstance& a, const FallacyInstance& b) {
    return registry.index_of(a.code) < registry.index_of(b.code);
  });
  result.detected = std::move(kept);

  if (auto meta = doc.find("metadata"); meta != doc.end() && meta->is_object()) {
    if (auto ref = meta->find("article_ref"); ref != meta->end() && ref->is_object()) {
      result.article_ref.content_hash = ref->value("content_hash", std::string());
      if (auto url = ref->find("url"); url != ref->end() && url->is_string()) {
        result.article_ref.url = url->get<std::string>();
      }
      result.article_ref.word_count = optional_size(*ref, "word_count");
      result.article_ref.sentence_count = optional_size(*ref, "sentence_count");
    }
    if (auto created = meta->find("created_at"); created != meta->end() && created->is_string()) {
      result.created_at = created->get<std::string>();
    }
    if (auto stored = meta->find("raw_response"); stored != meta->end() && stored->is_string()) {
      result.raw_response = stored->get<std::string>();
    }
  }
  return outcome;
}

ordered_json result_to_json(const AnalysisResult& result, const Article* article) {
  ordered_json codes = ordered_json::array();
  ordered_json spans = ordered_json::object();
  ordered_json annotations = ordered_json::object();
  for (const auto& d : result.detected) {
    codes.push_back(d.code);
    spans[d.code] = d.sentence_indices;
    if (d.layers.empty()) continue;
    ordered_json block = ordered_json::object();
    for (const auto& layer : d.layers) {
      ordered_json entry = {{"explanation", layer.explanation},
                            {"sentence", layer.sentence_span}};
      if (layer.link) entry["link"] = *layer.link;
      block[std::string(to_string(layer.level))] = ordered_json::array({entry});
    }
    annotations[d.code] = std::move(block);
  }
  ordered_json item = {{"name", result.title}, {"source", result.source}};
  if (article != nullptr) {
    ordered_json sentences = ordered_json::object();
    for (std::size_t i = 1; i <= article->sentence_count(); ++i) {
      sentences[std::to_string(i)] = article->sentence(i);
    }
    item["sentences"] = std::move(sentences);
  }
  item["fallacies"] = {{"logical_fallacies", std::move(codes)},
                       {"sentences", std::move(spans)},
                       {"annotations", std::move(annotations)}};

  ordered_json ref = {{"content_hash", result.article_ref.content_hash}};
  if (result.article_ref.url) ref["url"] = *result.article_ref.url;
  if (result.article_ref.word_count) ref["word_count"] = *result.article_ref.word_count;
  if (result.article_ref.sentence_count) {
    ref["sentence_count"] = *result.article_ref.sentence_count;
  }
  return {{"cases", ordered_json::array({std::move(item)})},
          {"metadata",
           {{"article_ref", std::move(ref)},
            {"created_at", result.created_at},
            {"raw_response", result.raw_response}}}};
}

std::string serialize_result(const AnalysisResult& result, const Article* article) {
  return result_to_json(result, article).dump();
}

std::optional<std::string> sanitize_link(std::string_view url) {
  while (!url.empty() && is_space(url.front())) url.remove_prefix(1);
  while (!url.empty() && is_space(url.back())) url.remove_suffix(1);
  std::string lower = ascii_lower(url);
  std::size_t scheme_len = 0;
  if (lower.rfind("https://", 0) == 0) scheme_len = 8;
  else if (lower.rfind("http://", 0) == 0) scheme_len = 7;
  else return std::nullopt;

  std::string_view rest = url.substr(scheme_len);
  auto authority_end = rest.find_first_of("/?#");
  std::string host = ascii_lower(rest.substr(0, authority_end));
  if (host != "www.google.com" && host != "www.bing.com") return std::nullopt;
  if (authority_end == std::string_view::npos) return std::nullopt;
  rest = rest.substr(authority_end);

  auto fragment_pos = rest.find('#');
  std::string_view fragment =
      fragment_pos == std::string_view::npos ? std::string_view{} : rest.substr(fragment_pos);
  rest = rest.substr(0, fragment_pos);
  auto query_pos = rest.find('?');
  if (query_pos == std::string_view::npos) return std::nullopt;
  if (rest.substr(0, query_pos) != "/search") return std::nullopt;
  std::string_view query = rest.substr(query_pos + 1);

  bool has_q = false;
  std::size_t start = 0;
  while (start <= query.size()) {
    auto amp = query.find('&', start);
    std::string_view param = query.substr(start, amp == std::string_view::npos ? amp : amp - start);
    if (param.rfind("q=", 0) == 0) {
      std::string value = form_decode(param.substr(2));
      if (value.find_first_not_of(" \t\r\n") != std::string::npos) has_q = true;
    }
    if (amp == std::string_view::npos) break;
    start = amp + 1;
  }
  if (!has_q) return std::nullopt;
  return "https://" + host + "/search?" + std::string(query) + std::string(fragment);
}

AnalysisResult sanitize_links(AnalysisResult result) {
  for (auto& d : result.detected) {
    for (auto& layer : d.layers) {
      if (layer.link) layer.link = sanitize_link(*layer.link);
    }
  }
  return result;
}

std::string content_hash(const Article& article) {
  return sha256_hex(normalize_whitespace(article.body()));
}

Article prepare_article(const AnalysisInput& input, const AnalyzeOptions& options) {
  if (input.value.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::PreconditionViolation, "analysis input is empty");
  }
  switch (input.kind) {
    case AnalysisInput::Kind::Url: {
      if (!options.fetcher) {
        throw Error(ErrorCode::PreconditionViolation, "no fetcher configured for URL input");
      }
      Article article = extract_article(options.fetcher(input.value), options.extraction);
      article.source_url = input.value;
      return article;
    }
    case AnalysisInput::Kind::Html:
      return extract_article(input.value, options.extraction);
    case AnalysisInput::Kind::Text:
      return article_from_text(input.value);
  }
  throw Error(ErrorCode::PreconditionViolation, "unknown input kind");
}

namespace {

bool is_parse_failure(ErrorCode code) {
  return code == ErrorCode::MalformedJson || code == ErrorCode::SchemaViolation ||
         code == ErrorCode::EmptyAfterFiltering;
}

}  // namespace

AnalyzeOutcome analyze_article(Article article, const FallacyRegistry& registry,
                               const LlmGateway& gateway, const ProviderConfig& config,
                               const AnalyzeOptions& options) {
  DetectionPrompt prompt = build_detection_prompt(article, registry, options.prompt);
  AnalyzeOutcome outcome;
  std::string last_error;
  for (int attempt = 0; attempt <= std::max(0, options.parse_retries); ++attempt) {
    std::string raw = gateway.complete(prompt, config);
    outcome.attempts = attempt + 1;
    try {
      ParseOutcome parsed =
          parse_llm_response(raw, registry, prompt.article_sentence_count, options.mode);
      AnalysisResult result = sanitize_links(std::move(parsed.result));
      result.raw_response = std::move(raw);
      result.article_ref = {content_hash(article), article.source_url, article.word_count,
                            article.sentence_count()};
      if (article.title) result.title = *article.title;
      if (article.source_url) result.source = *article.source_url;
      result.created_at = options.clock ? options.clock() : now_iso8601();
      outcome.result = std::move(result);
      outcome.warnings = std::move(parsed.warnings);
      outcome.article = std::move(article);
      return outcome;
    } catch (const Error& err) {
      if (!is_parse_failure(err.code())) throw;
      last_error = err.what();
    }
  }
  throw Error(ErrorCode::AnalysisFailed,
              "no usable response after " + std::to_string(outcome.attempts) +
                  " attempts (last: " + last_error + ")");
}

AnalyzeOutcome analyze(const AnalysisInput& input, const FallacyRegistry& registry,
                       const LlmGateway& gateway, const ProviderConfig& config,
                       const AnalyzeOptions& options) {
  return analyze_article(prepare_article(input, options), registry, gateway, config, options);
}

FallacyInstance regenerate_instance(const Article& article, const FallacyRegistry& registry,
                                    std::string_view code, const LlmGateway& gateway,
                                    const ProviderConfig& config,
                                    const AnalyzeOptions& options) {
  FallacyRegistry single = registry.restricted_to(code);
  DetectionPrompt prompt = build_regeneration_prompt(article, registry, code, options.prompt);
  std::string last_error = "no instance for " + std::string(code);
  for (int attempt = 0; attempt <= std::max(0, options.parse_retries); ++attempt) {
    std::string raw = gateway.complete(prompt, config);
    try {
      auto parsed = parse_llm_response(raw, single, prompt.article_sentence_count,
                                       ParseMode::Lenient);
      auto result = sanitize_links(std::move(parsed.result));
      if (const auto* instance = result.find(code)) return *instance;
    } catch (const Error& err) {
      if (!is_parse_failure(err.code())) throw;
      last_error = err.what();
    }
  }
  throw Error(ErrorCode::AnalysisFailed, "regeneration failed: " + last_error);
}

std::string hedged_explanation(const FallacyType& fallacy, std::string_view explanation) {
  std::string out = "This may be an example of " + fallacy.name + ".";
  auto trimmed = explanation.find_first_not_of(" \t\r\n");
  if (trimmed != std::string_view::npos) {
    out += " ";
    out += explanation.substr(trimmed);
  }
  return out;
}

OverlayPayload overlay_payload(const AnalysisResult& result, const Article& article,
                               const FallacyRegistry& registry) {
  std::vector<const FallacyInstance*> ordered;
  for (const auto& d : result.detected) {
    if (!registry.contains(d.code)) {
      throw Error(ErrorCode::InconsistentInput, "result uses unknown code " + d.code);
    }
    auto out_of_range = [&](std::size_t i) { return i == 0 || i > article.sentence_count(); };
    bool bad = std::any_of(d.sentence_indices.begin(), d.sentence_indices.end(), out_of_range);
    for (const auto& layer : d.layers) {
      bad = bad || std::any_of(layer.sentence_span.begin(), layer.sentence_span.end(),
                               out_of_range);
    }
    if (bad) {
      throw Error(ErrorCode::InconsistentInput,
                  d.code + " references sentences beyond the article");
    }
    ordered.push_back(&d);
  }
  std::sort(ordered.begin(), ordered.end(), [&](const auto* a, const auto* b) {
    return registry.index_of(a->code) < registry.index_of(b->code);
  });

  OverlayPayload payload;
  std::string title = result.title.empty() ? article.title.value_or("") : result.title;
  for (const auto* d : ordered) {
    const FallacyType& f = registry.at(d->code);
    for (std::size_t i : d->sentence_indices) payload.spans[i].push_back(d->code);
    payload.tags.push_back({f.code, f.name, f.color_index, f.context_needed});

    InterventionBundle bundle;
    bundle.code = f.code;
    bundle.name = f.name;
    bundle.definition = f.definition;
    bundle.sentence_indices = d->sentence_indices;
    for (const auto& layer : d->layers) {
      AnnotationLayer shown = layer;
      shown.explanation = hedged_explanation(f, layer.explanation);
      bundle.layers.push_back(std::move(shown));
    }
    bundle.wikipedia_link = wikipedia_link(f);
    std::string query = f.name;
    if (!title.empty()) query += " " + title;
    bundle.search_link = "https://www.google.com/search?q=" + form_encode(query);
    payload.bundles.push_back(std::move(bundle));
  }
  for (const auto& [index, _] : payload.spans) {
    payload.sentences.push_back(
        {index, article.sentence_paragraph[index - 1], article.sentence(index)});
  }
  return payload;
}

ordered_json payload_to_json(const OverlayPayload& payload) {
  ordered_json spans = ordered_json::object();
  for (const auto& [index, codes] : payload.spans) spans[std::to_string(index)] = codes;
  ordered_json tags = ordered_json::array();
  for (const auto& t : payload.tags) {
    tags.push_back({{"code", t.code},
                    {"name", t.name},
                    {"color_index", t.color_index},
                    {"context_needed", t.context_needed}});
  }
  ordered_json bundles = ordered_json::array();
  for (const auto& b : payload.bundles) {
    ordered_json layers = ordered_json::object();
    for (const auto& layer : b.layers) {
      ordered_json entry = {{"explanation", layer.explanation},
                            {"sentence", layer.sentence_span}};
      if (layer.link) entry["link"] = *layer.link;
      layers[std::string(to_string(layer.level))] = std::move(entry);
    }
    bundles.push_back({{"code", b.code},
                       {"name", b.name},
                       {"definition", b.definition},
                       {"sentences", b.sentence_indices},
                       {"levels", std::move(layers)},
                       {"wikipedia_link", b.wikipedia_link},
                       {"search_link", b.search_link}});
  }
  ordered_json sentences = ordered_json::array();
  for (const auto& s : payload.sentences) {
    sentences.push_back({{"index", s.index}, {"paragraph", s.paragraph}, {"text", s.text}});
  }
  return {{"spans", std::move(spans)},
          {"tags", std::move(tags)},
          {"interventions", std::move(bundles)},
          {"sentences", std::move(sentences)}};
}

}  // namespace skeptik
