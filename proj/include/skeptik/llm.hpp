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

// The language-model layer: prompt construction, provider dispatch with
// retries, and per-fallacy chat sessions.

#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skeptik/extraction.hpp"
#include "skeptik/taxonomy.hpp"

namespace skeptik {

struct ProviderConfig {
  std::string provider_id = "mock";
  std::string model_name = "mock-rules-1";
  double temperature = 0.0;
  int max_retries = 2;
  std::chrono::milliseconds timeout{30'000};
  // First backoff delay; doubles per retry and is jittered into [d/2, d].
  std::chrono::milliseconds retry_base_delay{500};

  // Throws Error(InvalidConfig).
  void validate() const;
};

// Detection favours reproducibility; chat allows some variety.
inline constexpr double kDetectionTemperature = 0.0;
inline constexpr double kChatTemperature = 0.7;

struct PromptOptions {
  // Articles longer than this are truncated to their first sentences.
  std::size_t sentence_cap = 200;
};

struct DetectionPrompt {
  std::string text;
  std::string registry_version;
  // Number of numbered sentences embedded in `text`.
  std::size_t article_sentence_count = 0;
  // Set for single-fallacy regeneration prompts.
  std::optional<std::string> restricted_code;
};

// Marker line that precedes the numbered article sentences in every
// detection prompt; each sentence follows as "[n] text".
inline constexpr std::string_view kArticleSentencesMarker = "Article sentences:";

// Throws EmptyArticle or EmptyRegistry.
DetectionPrompt build_detection_prompt(const Article& article,
                                       const FallacyRegistry& registry,
                                       const PromptOptions& options = {});

// Same article, restricted to re-annotating one fallacy. Throws UnknownCode.
DetectionPrompt build_regeneration_prompt(const Article& article,
                                          const FallacyRegistry& registry,
                                          std::string_view fallacy_code,
                                          const PromptOptions& options = {});

enum class Role { System, User, Assistant };
std::string_view to_string(Role role);

struct Message {
  Role role = Role::User;
  std::string text;

  bool operator==(const Message&) const = default;
};

// A completion backend. Implementations must be safe for concurrent calls
// and report failures as Error(ProviderUnavailable | Timeout | AuthFailure).
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  virtual std::string complete(std::span<const Message> messages,
                               const ProviderConfig& config) = 0;
};

// Dispatches to registered providers, retrying transport failures
// (ProviderUnavailable, Timeout) with jittered exponential backoff.
class LlmGateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  LlmGateway();

  void register_provider(std::shared_ptr<Provider> provider);
  bool has_provider(std::string_view id) const;
  std::shared_ptr<Provider> provider(std::string_view id) const;

  // Replaces the backoff sleep, e.g. to record delays in tests.
  void set_sleeper(Sleeper sleeper);

  std::string complete(const DetectionPrompt& prompt,
                       const ProviderConfig& config) const;
  std::string complete(std::span<const Message> messages,
                       const ProviderConfig& config) const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Provider>, std::less<>> providers_;
  Sleeper sleeper_;
};

// Trigger substring (case-insensitive) that makes the mock provider flag a
// sentence with `code`.
struct MockRule {
  std::string trigger;
  std::string code;
};

// One rule per default fallacy:
//   "trust me" EBP, "wants to take away" ST, "but what about" RH,
//   "only the figures" CP, "is just like" FA, "all of them" HG,
//   "ever since" PH, "because both" FC, "make things better" VAG.
std::vector<MockRule> default_mock_rules();

// Deterministic offline provider. For detection prompts it applies the rule
// table to the numbered sentences, restricted to the fallacies whose
// definition blocks appear in the prompt, and answers with a fenced,
// schema-valid JSON document. For chat it echoes a deterministic reply.
class MockProvider final : public Provider {
 public:
  explicit MockProvider(std::vector<MockRule> rules = default_mock_rules());

  std::string id() const override { return "mock"; }
  std::string complete(std::span<const Message> messages,
                       const ProviderConfig& config) override;

  std::size_t call_count() const noexcept { return calls_.load(); }
  const std::vector<MockRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<MockRule> rules_;
  std::atomic<std::size_t> calls_{0};
};

// Chat-completions client for OpenAI-compatible HTTP APIs
// (POST {base_url}/v1/chat/completions). The key is sent as a bearer token
// and never logged.
class HttpChatProvider final : public Provider {
 public:
  HttpChatProvider(std::string id, std::string base_url, std::string api_key);

  std::string id() const override { return id_; }
  std::string complete(std::span<const Message> messages,
                       const ProviderConfig& config) override;

 private:
  std::string id_;
  std::string base_url_;
  std::string api_key_;
};

struct ChatSession {
  std::string session_id;
  std::string fallacy_code;
  // The sentences flagged for the fallacy.
  std::vector<std::string> article_context;
  // System preamble handed to the provider before the history.
  std::string preamble;
  // Alternates user/assistant, starting with user.
  std::vector<Message> history;
  std::string created_at;
};

// Seeds a session with the fallacy definition, the flagged sentences and
// the intervention texts already generated for it (L1, L2, L3 order).
ChatSession start_chat_session(const FallacyType& fallacy,
                               std::vector<std::string> flagged_sentences,
                               std::span<const std::string> interventions);

struct ChatReply {
  std::string reply;
  ChatSession session;
};

// Sends preamble + history + the new message. On success the returned
// session has the user message and reply appended; on error the input
// session is untouched. Throws PreconditionViolation for an empty message.
ChatReply chat_turn(const ChatSession& session, std::string_view user_message,
                    const ProviderConfig& config, const LlmGateway& gateway);

}  // namespace skeptik
