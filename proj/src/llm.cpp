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

#include "skeptik/llm.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "skeptik/error.hpp"
#include "skeptik/util.hpp"

namespace skeptik {

namespace {

constexpr std::string_view kPreamble =
    "You are an expert skilled in detecting logical fallacies and explaining "
    "why these fallacies occur.";

constexpr std::string_view kLevelSemantics =
    "Level 1 (L1) focuses on immediate correction, Level 2 (L2) provides a "
    "detailed analysis with evidence, and Level 3 (L3) aims to preemptively "
    "inform and educate the reader about potential misinformation. All "
    "explanations should be filled.";

constexpr std::string_view kExplanationRules =
    "Each explanation should:\n"
    "Be supported by specific examples and evidence from reputable sources. "
    "Incorporate at least one outbound link to Google or Bing that offers a "
    "contrasting viewpoint or additional data if appropriate. Please only use "
    "Google or Bing, replacing the query with a contrasting idea. For example, "
    "if you suggest looking at examples where \"the earth is not flat\" then "
    "provide the link https://www.google.com/search?q=the+earth+is+not+flat\n"
    "Output in JSON code environment.";

std::string output_template(const std::vector<std::string>& codes) {
  // Illustrative sentence numbers, as in the reference template.
  static const std::vector<std::string> kSpans = {"[4, 5, 10]", "[17, 18]"};
  std::ostringstream out;
  out << "{\"cases\": [{\n"
      << "  \"name\": \"Title\",\n"
      << "  \"source\": \"WSJ\",\n"
      << "  \"sentences\": {\"1\": \"sentence 1\", \"2\": \"sentence 2\"},\n"
      << "  \"fallacies\": {\n"
      << "    \"logical_fallacies\": [";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out << (i ? ", " : "") << '"' << codes[i] << '"';
  }
  out << "],\n    \"sentences\": {\n";
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out << "      \"" << codes[i] << "\": " << kSpans[i]
        << (i + 1 < codes.size() ? ",\n" : "},\n");
  }
  out << "    \"annotations\": {\n"
      << "      \"" << codes.front() << "\": {\n"
      << "        \"L1\": [{\n"
      << "          \"explanation\": \"insert explanation here\",\n"
      << "          \"sentence\": [4, 5],\n"
      << "          \"link\": \"URL\"}],\n"
      << "        \"L2\": [{\n"
      << "          \"explanation\": \"insert explanation here\",\n"
      << "          \"sentence\": [4, 5]}],\n"
      << "        \"L3\": [{\n"
      << "          \"explanation\": \"insert explanation here\",\n"
      << "          \"sentence\": [4, 5]}]\n"
      << "      }\n"
      << "    }\n"
      << "  }\n"
      << "}]}";
  return out.str();
}

void append_definition(std::ostringstream& out, const FallacyType& f) {
  out << f.name << " (" << f.code << "): " << f.definition << "\n"
      << "Example: " << f.example << "\n\n";
}

void append_article(std::ostringstream& out, const Article& article,
                    std::size_t count) {
  out << "Title: " << article.title.value_or("") << "\n";
  out << "Source: " << article.source_url.value_or("") << "\n";
  out << kArticleSentencesMarker << "\n";
  for (std::size_t i = 1; i <= count; ++i) {
    out << "[" << i << "] " << article.sentence(i) << "\n";
  }
}

std::size_t capped_count(const Article& article, const PromptOptions& options) {
  if (article.sentence_count() == 0) {
    throw Error(ErrorCode::EmptyArticle, "article has no sentences");
  }
  return std::min(article.sentence_count(), std::max<std::size_t>(1, options.sentence_cap));
}

std::string count_phrase(std::size_t n) {
  return n == 1 ? "Here is 1 fallacy." : "Here are " + std::to_string(n) + " fallacies.";
}

bool is_transient(ErrorCode code) {
  return code == ErrorCode::ProviderUnavailable || code == ErrorCode::Timeout;
}

}  // namespace

void ProviderConfig::validate() const {
  if (provider_id.empty()) {
    throw Error(ErrorCode::InvalidConfig, "provider_id must be set");
  }
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::InvalidConfig, "temperature must be >= 0");
  }
  if (max_retries < 0) {
    throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  }
  if (timeout.count() <= 0) {
    throw Error(ErrorCode::InvalidConfig, "timeout must be positive");
  }
}

DetectionPrompt build_detection_prompt(const Article& article,
                                       const FallacyRegistry& registry,
                                       const PromptOptions& options) {
  std::size_t count = capped_count(article, options);
  if (registry.empty()) {
    throw Error(ErrorCode::EmptyRegistry, "registry has no fallacies");
  }
  std::ostringstream out;
  out << kPreamble << " " << count_phrase(registry.size()) << "\n\n";
  for (const auto& f : registry.entries()) append_definition(out, f);

  std::vector<std::string> example_codes;
  for (const auto& f : registry.entries()) {
    if (example_codes.size() == 2) break;
    example_codes.push_back(f.code);
  }
  out << "Please state all logical fallacies that are present in the text "
         "from this list. Explain where the fallacy occurs and why.\n\n"
      << "Output a JSON (example):\n"
      << output_template(example_codes) << "\n"
      << kLevelSemantics << "\n\n"
      << kExplanationRules << "\n\n";
  append_article(out, article, count);
  return {out.str(), registry.version(), count, std::nullopt};
}

DetectionPrompt build_regeneration_prompt(const Article& article,
                                          const FallacyRegistry& registry,
                                          std::string_view fallacy_code,
                                          const PromptOptions& options) {
  const FallacyType& f = registry.at(fallacy_code);
  std::size_t count = capped_count(article, options);
  std::ostringstream out;
  out << kPreamble << " " << count_phrase(1) << "\n\n";
  append_definition(out, f);
  out << "Re-examine the text for " << f.name << " (" << f.code
      << ") only. State where it occurs and why, regenerate its explanations "
         "and corrections, and report no other fallacy.\n\n"
      << "Output a JSON (example):\n"
      << output_template({f.code}) << "\n"
      << kLevelSemantics << "\n\n"
      << kExplanationRules << "\n\n";
  append_article(out, article, count);
  return {out.str(), registry.version(), count, f.code};
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

LlmGateway::LlmGateway()
    : sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

void LlmGateway::register_provider(std::shared_ptr<Provider> provider) {
  std::unique_lock lock(mutex_);
  auto id = provider->id();
  providers_[id] = std::move(provider);
}

bool LlmGateway::has_provider(std::string_view id) const {
  std::shared_lock lock(mutex_);
  return providers_.find(id) != providers_.end();
}

std::shared_ptr<Provider> LlmGateway::provider(std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = providers_.find(id);
  return it == providers_.end() ? nullptr : it->second;
}

void LlmGateway::set_sleeper(Sleeper sleeper) {
  std::unique_lock lock(mutex_);
  sleeper_ = std::move(sleeper);
}

std::string LlmGateway::complete(const DetectionPrompt& prompt,
                                 const ProviderConfig& config) const {
  Message message{Role::User, prompt.text};
  return complete(std::span<const Message>(&message, 1), config);
}

std::string LlmGateway::complete(std::span<const Message> messages,
                                 const ProviderConfig& config) const {
  config.validate();
  auto backend = provider(config.provider_id);
  if (!backend) {
    throw Error(ErrorCode::ProviderUnavailable,
                "no provider registered as '" + config.provider_id + "'");
  }
  Sleeper sleep;
  {
    std::shared_lock lock(mutex_);
    sleep = sleeper_;
  }
  thread_local std::mt19937 jitter_rng{std::random_device{}()};
  for (int attempt = 0;; ++attempt) {
    try {
      return backend->complete(messages, config);
    } catch (const Error& err) {
      if (!is_transient(err.code()) || attempt >= config.max_retries) throw;
      auto delay = config.retry_base_delay.count() * (std::int64_t{1} << std::min(attempt, 20));
      std::uniform_int_distribution<std::int64_t> jitter(delay / 2, std::max<std::int64_t>(delay, 0));
      sleep(std::chrono::milliseconds(jitter(jitter_rng)));
    }
  }
}

std::vector<MockRule> default_mock_rules() {
  return {
      {"trust me", "EBP"},        {"wants to take away", "ST"},
      {"but what about", "RH"},   {"only the figures", "CP"},
      {"is just like", "FA"},     {"all of them", "HG"},
      {"ever since", "PH"},       {"because both", "FC"},
      {"make things better", "VAG"},
  };
}

MockProvider::MockProvider(std::vector<MockRule> rules) : rules_(std::move(rules)) {}

std::string MockProvider::complete(std::span<const Message> messages,
                                   const ProviderConfig& /*config*/) {
  ++calls_;
  if (messages.empty()) {
    throw Error(ErrorCode::PreconditionViolation, "no messages");
  }
  const std::string& last = messages.back().text;
  auto marker = last.find(std::string(kArticleSentencesMarker) + "\n");

  if (marker == std::string::npos) {
    // Chat: reply about the fallacy named in the system preamble.
    static const std::regex kTopic(R"(possible (.+) \(([A-Z0-9]+)\) in a news article)");
    std::string topic = "the flagged passage";
    for (const auto& m : messages) {
      std::smatch match;
      if (m.role == Role::System && std::regex_search(m.text, match, kTopic)) {
        topic = match[1].str() + " (" + match[2].str() + ")";
      }
    }
    auto turn = std::count_if(messages.begin(), messages.end(),
                              [](const Message& m) { return m.role == Role::User; });
    return "Turn " + std::to_string(turn) + ": this passage may be an example of " +
           topic + ". You asked: \"" + last + "\"";
  }

  // Detection: collect definition codes, title and numbered sentences.
  static const std::regex kDefinition(R"(^.*? \(([A-Z0-9]+)\): )");
  static const std::regex kSentence(R"(^\[(\d+)\] (.*)$)");
  std::vector<std::string> codes;
  std::map<std::string, std::string> names;
  std::vector<std::pair<std::size_t, std::string>> sentences;
  std::string title;
  std::istringstream lines(last);
  std::string line;
  std::string previous;
  bool in_article = false;
  while (std::getline(lines, line)) {
    if (in_article) {
      std::smatch match;
      if (std::regex_match(line, match, kSentence)) {
        sentences.emplace_back(std::stoul(match[1].str()), match[2].str());
      }
      continue;
    }
    if (line == kArticleSentencesMarker) {
      in_article = true;
    } else if (line.rfind("Title: ", 0) == 0) {
      title = line.substr(7);
    } else if (line.rfind("Example: ", 0) == 0) {
      std::smatch match;
      if (std::regex_search(previous, match, kDefinition)) {
        codes.push_back(match[1].str());
        names[match[1].str()] = previous.substr(0, static_cast<std::size_t>(match.position(1)) - 2);
      }
    }
    previous = line;
  }

  std::map<std::string, std::vector<std::size_t>> hits;
  std::map<std::string, std::string> trigger_of;
  for (const auto& rule : rules_) {
    if (std::find(codes.begin(), codes.end(), rule.code) == codes.end()) continue;
    auto needle = ascii_lower(rule.trigger);
    for (const auto& [index, text] : sentences) {
      if (ascii_lower(text).find(needle) != std::string::npos) {
        auto& list = hits[rule.code];
        if (std::find(list.begin(), list.end(), index) == list.end()) {
          list.push_back(index);
        }
        trigger_of.emplace(rule.code, rule.trigger);
      }
    }
  }

  nlohmann::ordered_json detected = nlohmann::ordered_json::array();
  nlohmann::ordered_json spans = nlohmann::ordered_json::object();
  nlohmann::ordered_json annotations = nlohmann::ordered_json::object();
  for (const auto& code : codes) {
    auto it = hits.find(code);
    if (it == hits.end()) continue;
    auto indices = it->second;
    std::sort(indices.begin(), indices.end());
    const std::string& name = names[code];
    std::string where;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      where += (i ? ", " : "") + std::to_string(indices[i]);
    }
    detected.push_back(code);
    spans[code] = indices;
    annotations[code] = {
        {"L1",
         {{{"explanation", "Sentence " + where + " may rely on " + name +
                               ": the claim is not backed by the reasoning offered."},
           {"sentence", indices},
           {"link", "https://www.google.com/search?q=" +
                        form_encode(ascii_lower(name) + " counter evidence")}}}},
        {"L2",
         {{{"explanation", "Compare the claim in sentence " +
                               std::to_string(indices.front()) +
                               " with independent data before accepting it."},
           {"sentence", std::vector<std::size_t>{indices.front()}},
           {"link", "https://www.bing.com/search?q=" + form_encode(trigger_of[code])}}}},
        {"L3",
         {{{"explanation", name + " is common in contested news coverage; "
                                  "reading several independent sources helps."},
           {"sentence", indices},
           {"link", "https://example.org/read-more?topic=" + form_encode(code)}}}},
    };
  }
  nlohmann::ordered_json doc = {
      {"cases",
       {{{"name", title},
         {"source", "mock"},
         {"fallacies",
          {{"logical_fallacies", detected},
           {"sentences", spans},
           {"annotations", annotations}}}}}}};
  return "Here is the analysis of the article.\n```json\n" + doc.dump(2) + "\n```\n";
}

ChatSession start_chat_session(const FallacyType& fallacy,
                               std::vector<std::string> flagged_sentences,
                               std::span<const std::string> interventions) {
  std::ostringstream out;
  out << "You are an expert in logical fallacies helping a reader discuss a possible "
      << fallacy.name << " (" << fallacy.code
      << ") in a news article. Present it as a possibility for the reader to "
         "weigh, not a verdict.\n"
      << "Definition: " << fallacy.definition << "\n"
      << "Example: " << fallacy.example << "\n"
      << "Flagged sentences:\n";
  for (const auto& s : flagged_sentences) out << "- " << s << "\n";
  if (!interventions.empty()) {
    out << "Interventions already shown to the reader:\n";
    for (std::size_t i = 0; i < interventions.size(); ++i) {
      out << "L" << (i + 1) << ": " << interventions[i] << "\n";
    }
  }
  out << "Answer the reader's questions in the context of this fallacy.";

  ChatSession session;
  session.session_id = random_hex_id();
  session.fallacy_code = fallacy.code;
  session.article_context = std::move(flagged_sentences);
  session.preamble = out.str();
  session.created_at = now_iso8601();
  return session;
}

ChatReply chat_turn(const ChatSession& session, std::string_view user_message,
                    const ProviderConfig& config, const LlmGateway& gateway) {
  if (user_message.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::PreconditionViolation, "chat message is empty");
  }
  std::vector<Message> messages;
  messages.reserve(session.history.size() + 2);
  messages.push_back({Role::System, session.preamble});
  messages.insert(messages.end(), session.history.begin(), session.history.end());
  messages.push_back({Role::User, std::string(user_message)});

  std::string reply = gateway.complete(messages, config);

  ChatReply out{reply, session};
  out.session.history.push_back({Role::User, std::string(user_message)});
  out.session.history.push_back({Role::Assistant, std::move(reply)});
  return out;
}

}  // namespace skeptik
